#include <iostream>

#include "foldhinge/cli.hpp"

int main(int argc, char** argv) {
    return foldhinge::cli::run_cli(argc, argv, std::cout, std::cerr);
}
