#include <iostream>

#include "sbst/cli.hpp"

int main(int argc, char** argv) { return sbst::run_cli(argc, argv, std::cout, std::cerr); }
