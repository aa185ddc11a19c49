#include "fsp/cli.hpp"

int main(int argc, char** argv) { return fsp::cli_main(argc, argv); }
