#include <iostream>
#include <string>
#include <vector>

#include "confsd/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return confsd::run_cli(args, std::cout, std::cerr);
}
