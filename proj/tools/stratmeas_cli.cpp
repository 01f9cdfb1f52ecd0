#include <iostream>

#include "stratmeas/cli.hpp"

int main(int argc, char** argv) { return stratmeas::run_cli(argc, argv, std::cout, std::cerr); }
