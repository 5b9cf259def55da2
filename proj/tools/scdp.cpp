#include "scdp/cli/commands.hpp"

int main(int argc, char** argv) { return scdp::cli::main_entry(argc, argv); }
