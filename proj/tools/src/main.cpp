#include <iostream>

#include "entest/experiment.hpp"

int main(int argc, char** argv) {
    return entest::cli::run_cli(argc, argv, std::cout, std::cerr);
}
