#include "cli.hpp"

int main(int argc, char** argv) { return wwmon::cli::run_command(argc, argv); }
