#include "commands.hpp"

int main(int argc, char** argv) { return dbtool::run_cli(argc, argv); }
