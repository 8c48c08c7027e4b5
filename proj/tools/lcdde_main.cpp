#include "lcdde/cli.hpp"

int main(int argc, char** argv) { return lcdde::run_cli(argc, argv); }
