#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "karcher/manifold.hpp"

namespace karcher::literal {

// Manifold specs:
//   euclidean:<n>            R^n
//   sphere:<n>               S^n in R^{n+1}
//   so:<m>:k=<k>             SO(m) with metric k g_SO (":k=<k>" optional, default 1)
//   diagpos:<m>              positive diagonal m x m
//   product(<spec>;<spec>…)  Riemannian product, any depth
//
// Point literals: comma-separated numbers per leaf factor (SO(m) and SPD
// matrices row-major), leaves of a product joined with ';' in depth-first
// order. Whitespace is ignored. Numbers are printed with 17 significant
// digits so every printed literal parses back to the same doubles.

Manifold parse_manifold(std::string_view spec);

Vec parse_numbers(std::string_view text);
Point parse_point(const Manifold& manifold, std::string_view text);
std::string format_point(const Manifold& manifold, const Vec& coords);
std::string format_point(const Manifold& manifold, const Point& p);

/// Square matrix from a row-major literal; the size is inferred.
Mat parse_matrix(std::string_view text);
std::string format_matrix(const Mat& a);

std::string format_double(double x);
std::string format_vector(const Vec& v);

/// Non-empty lines with '#' comments and surrounding whitespace removed.
std::vector<std::string> content_lines(std::istream& in);
std::vector<Point> read_points(const Manifold& manifold, std::istream& in);
std::vector<Point> read_points_file(const Manifold& manifold, const std::string& path);
std::vector<std::string> read_lines_file(const std::string& path);

}  // namespace karcher::literal
