#include <iostream>
#include <string>
#include <vector>

#include "aeq/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return aeq::cli::run(args, std::cout, std::cerr);
}
