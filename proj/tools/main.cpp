#include <vector>

#include "leafseg/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return leafseg::run_cli(args);
}
