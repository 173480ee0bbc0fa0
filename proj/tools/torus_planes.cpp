#include <torus_planes/cli.hpp>

int main(int argc, char** argv) { return torus_planes::cli::run(argc, argv); }
