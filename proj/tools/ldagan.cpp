#include "ldagan/cli.hpp"

int main(int argc, char** argv) {
    return ldagan::cli::run(argc, argv);
}
