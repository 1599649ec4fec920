#include "dflow/cli.hpp"

int main(int argc, char** argv) { return dflow::cli::run_cli(argc, argv); }
