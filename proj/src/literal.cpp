#include "karcher/literal.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "karcher/errors.hpp"

namespace karcher::literal {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_top_level(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (depth < 0) throw Error(ErrorKind::InvalidInput, "unbalanced ')' in '" + std::string(s) + "'");
    if (s[i] == sep && depth == 0) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (depth != 0) throw Error(ErrorKind::InvalidInput, "unbalanced '(' in '" + std::string(s) + "'");
  out.push_back(trim(s.substr(start)));
  return out;
}

double parse_double(std::string_view s) {
  s = trim(s);
  const std::string owned(s);
  if (owned.empty()) throw Error(ErrorKind::InvalidInput, "empty number");
  char* end = nullptr;
  const double x = std::strtod(owned.c_str(), &end);
  if (end != owned.c_str() + owned.size()) throw Error(ErrorKind::InvalidInput, "not a number: '" + owned + "'");
  return x;
}

int parse_int(std::string_view s) {
  s = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::InvalidInput, "not an integer: '" + std::string(s) + "'");
  }
  return v;
}

void collect_leaves(const Manifold& m, std::vector<const Manifold*>& leaves) {
  if (m.kind() == Manifold::Kind::Product) {
    for (const Manifold& f : m.factors()) collect_leaves(f, leaves);
  } else {
    leaves.push_back(&m);
  }
}

}  // namespace

Manifold parse_manifold(std::string_view spec) {
  spec = trim(spec);
  const std::string s(spec);
  if (s.rfind("product(", 0) == 0) {
    if (s.back() != ')') throw Error(ErrorKind::InvalidInput, "product spec must end with ')': " + s);
    std::vector<Manifold> factors;
    for (std::string_view f : split_top_level(spec.substr(8, spec.size() - 9), ';')) factors.push_back(parse_manifold(f));
    return Manifold::product(std::move(factors));
  }
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw Error(ErrorKind::InvalidInput, "manifold spec needs '<name>:<size>': " + s);
  const std::string name = s.substr(0, colon);
  std::string_view rest = spec.substr(colon + 1);
  if (name == "so") {
    double k = 1.0;
    const auto kpos = rest.find(':');
    if (kpos != std::string_view::npos) {
      std::string_view kpart = trim(rest.substr(kpos + 1));
      if (kpart.rfind("k=", 0) != 0) throw Error(ErrorKind::InvalidInput, "expected k=<k> in " + s);
      k = parse_double(kpart.substr(2));
      rest = rest.substr(0, kpos);
    }
    return Manifold::special_orthogonal(parse_int(rest), k);
  }
  const int n = parse_int(rest);
  if (name == "euclidean") return Manifold::euclidean(n);
  if (name == "sphere") return Manifold::sphere(n);
  if (name == "diagpos") return Manifold::diag_pos(n);
  throw Error(ErrorKind::InvalidInput, "unknown manifold '" + name + "'");
}

Vec parse_numbers(std::string_view text) {
  std::vector<double> values;
  for (std::string_view part : split_top_level(trim(text), ',')) values.push_back(parse_double(part));
  return Eigen::Map<Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Point parse_point(const Manifold& manifold, std::string_view text) {
  std::vector<const Manifold*> leaves;
  collect_leaves(manifold, leaves);
  const auto parts = split_top_level(trim(text), ';');
  if (parts.size() != leaves.size()) {
    throw Error(ErrorKind::InvalidInput, "point literal has " + std::to_string(parts.size()) + " factor(s), " +
                                             manifold.descriptor() + " needs " + std::to_string(leaves.size()));
  }
  Vec coords(manifold.ambient_size());
  Eigen::Index offset = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Vec v = parse_numbers(parts[i]);
    if (v.size() != leaves[i]->ambient_size()) {
      throw Error(ErrorKind::InvalidInput, "factor " + leaves[i]->descriptor() + " needs " +
                                               std::to_string(leaves[i]->ambient_size()) + " numbers, got " +
                                               std::to_string(v.size()));
    }
    coords.segment(offset, v.size()) = v;
    offset += v.size();
  }
  return manifold.point(coords);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_vector(const Vec& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v(i));
  }
  return out;
}

std::string format_point(const Manifold& manifold, const Vec& coords) {
  std::vector<const Manifold*> leaves;
  collect_leaves(manifold, leaves);
  std::string out;
  Eigen::Index offset = 0;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (i) out += ';';
    const Eigen::Index n = leaves[i]->ambient_size();
    out += format_vector(coords.segment(offset, n));
    offset += n;
  }
  return out;
}

std::string format_point(const Manifold& manifold, const Point& p) { return format_point(manifold, p.coords); }

Mat parse_matrix(std::string_view text) {
  const Vec v = parse_numbers(text);
  const auto m = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (m * m != v.size() || m == 0) {
    throw Error(ErrorKind::InvalidInput, "matrix literal with " + std::to_string(v.size()) + " entries is not square");
  }
  return as_matrix(v, static_cast<int>(m));
}

std::string format_matrix(const Mat& a) { return format_vector(as_coords(a)); }

std::vector<std::string> content_lines(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string_view t = trim(line);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::vector<Point> read_points(const Manifold& manifold, std::istream& in) {
  std::vector<Point> out;
  for (const std::string& line : content_lines(in)) out.push_back(parse_point(manifold, line));
  return out;
}

std::vector<std::string> read_lines_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open '" + path + "'");
  return content_lines(in);
}

std::vector<Point> read_points_file(const Manifold& manifold, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open '" + path + "'");
  return read_points(manifold, in);
}

}  // namespace karcher::literal
