#include "teamtrack/cli_commands.hpp"

int main(int argc, char** argv) { return teamtrack::run_cli(argc, argv); }
