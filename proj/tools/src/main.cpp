#include <iostream>

#include "levi_cli/cli.hpp"

int main(int argc, char** argv) {
    return levi::cli::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
