#include "scconv/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return scconv::run_cli(argc, argv, std::cout, std::cerr);
}
