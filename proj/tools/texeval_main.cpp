#include <iostream>
#include <string>
#include <vector>

#include "texeval/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return texeval::run_cli(args, std::cout, std::cerr);
}
