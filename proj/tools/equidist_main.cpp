#include "equidist/cli.hpp"

int main(int argc, char** argv) { return equidist::cli::run(argc, argv); }
