#include <iostream>

#include "sdpbound/cli.hpp"

int main(int argc, char** argv) {
    return sdpbound::run_cli(argc, argv, std::cout, std::cerr);
}
