#include "nsch/cli.hpp"

int main(int argc, char** argv) { return nsch::cli::main(argc, argv); }
