#include "pulsegabor/cli.hpp"

int main(int argc, char** argv) {
    return pulsegabor::run_cli(argc, argv);
}
