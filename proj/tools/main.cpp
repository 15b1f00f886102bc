#include "learnorder/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return learnorder::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
