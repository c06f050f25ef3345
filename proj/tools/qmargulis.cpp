#include "qmargulis/cli.hpp"

int main(int argc, char** argv) { return qmargulis::cli::run(argc, argv); }
