#include <iostream>

#include "rblab/cli.hpp"

int main(int argc, char** argv) { return rblab::run_cli(argc, argv, std::cout, std::cerr); }
