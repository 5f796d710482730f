#include <iostream>

#include "moverec/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return moverec::run_cli(args, std::cout, std::cerr);
}
