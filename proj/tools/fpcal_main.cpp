#include <iostream>
#include <string>
#include <vector>

#include "fpcal_cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return fpcal::cli::run(args, std::cout, std::cerr);
}
