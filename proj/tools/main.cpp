#include "lexground/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return lexground::run_cli(argc, argv, std::cout, std::cerr); }
