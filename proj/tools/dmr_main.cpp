#include <iostream>
#include <string>
#include <vector>

#include "dmr/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dmr::cli_dispatch(std::move(args), std::cout, std::cerr);
}
