#include "mvd/cli/commands.hpp"

int main(int argc, char** argv) { return mvd::cli::run(argc, argv); }
