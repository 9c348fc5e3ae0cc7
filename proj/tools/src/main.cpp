#include <iostream>

#include "throttle/cli.hpp"

int main(int argc, char** argv) { return throttle::cli::run(argc, argv, std::cout, std::cerr); }
