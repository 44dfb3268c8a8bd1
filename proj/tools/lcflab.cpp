#include "lcflab/cli.hpp"

int main(int argc, char** argv) { return lcf::cli::run_cli(argc, argv); }
