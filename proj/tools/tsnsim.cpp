#include "tsn/cli.hpp"

int main(int argc, char** argv) { return tsn::cli::main(argc, argv); }
