#include <iostream>

#include "har_audit/cli/commands.hpp"

int main(int argc, char** argv) { return har_audit::cli::run_cli(argc, argv, std::cout, std::cerr); }
