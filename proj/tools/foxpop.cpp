#include "foxpop/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return foxpop::cli::main(argc, argv, std::cout, std::cerr);
}
