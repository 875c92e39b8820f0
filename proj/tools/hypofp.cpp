#include "hypofp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return hypofp::run_cli(argc, argv, std::cout, std::cerr); }
