#include "cgmap/cli.hpp"

int main(int argc, char** argv) {
    return cgmap::cli::run(argc, argv);
}
