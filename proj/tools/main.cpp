#include "simukit/cli.hpp"

int main(int argc, char** argv) { return simukit::cli::run(argc, argv); }
