#include "cascade/commands.hpp"

int main(int argc, char** argv) { return cascade::run_cli(argc, argv); }
