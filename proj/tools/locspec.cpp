#include <iostream>
#include <string>
#include <vector>

#include "locspec/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return locspec::run_cli(args, std::cout, std::cerr);
}
