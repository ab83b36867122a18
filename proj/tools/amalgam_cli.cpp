#include "amalgam/cli.hpp"

int main(int argc, char** argv) {
    return amalgam::run_cli(argc, argv);
}
