#include "iotnames_cli/cli.hpp"

int main(int argc, char** argv) { return iotnames::cli::run(argc, argv); }
