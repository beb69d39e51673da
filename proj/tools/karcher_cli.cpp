#include <iostream>

#include "karcher/cli.hpp"

int main(int argc, char** argv) { return karcher::run_cli(argc, argv, std::cout, std::cerr); }
