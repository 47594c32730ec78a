#include <iostream>

#include "weakperf/cli.hpp"

int main(int argc, char** argv) { return weakperf::run_cli(argc, argv, std::cout, std::cerr); }
