#include "cyclesynth/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return cyclesynth::runCli(args, std::cout, std::cerr);
}
