#include "clasp/cli.hpp"

int main(int argc, char** argv) { return clasp::cli::main(argc, argv); }
