#include <iostream>
#include <string>
#include <vector>

#include "femsyn/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return femsyn::cli::run(args, std::cout, std::cerr);
}
