#include <iostream>

#include "nlsym/cli.hpp"

int main(int argc, char** argv) { return nlsym::run_cli(argc, argv, std::cout, std::cerr); }
