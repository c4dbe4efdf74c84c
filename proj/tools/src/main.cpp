#include "astrack_cli/cli.hpp"

int main(int argc, char** argv) { return astrack::cli::run_cli(argc, argv); }
