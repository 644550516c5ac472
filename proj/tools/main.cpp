#include <iostream>

#include "nilmel/cli.hpp"

int main(int argc, char** argv) {
    return nilmel::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
