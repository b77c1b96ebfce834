#include "bfgp/cli.hpp"

int main(int argc, char** argv) { return bfgp::cli::main(argc, argv); }
