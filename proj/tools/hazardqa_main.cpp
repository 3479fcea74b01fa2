#include "hazardqa/cli.hpp"

int main(int argc, char** argv) {
    return hazardqa::cli::main(argc, argv);
}
