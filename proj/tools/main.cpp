#include <iostream>
#include <string>
#include <vector>

#include "tcsde/cli.hpp"

int main(int argc, char** argv) {
    return tcsde::cli::main(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
