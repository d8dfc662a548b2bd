#include "smartground/cli.hpp"

int main(int argc, char** argv) { return smartground::cli::main(argc, argv); }
