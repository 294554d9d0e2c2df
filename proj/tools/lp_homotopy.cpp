#include "lph/cli.hpp"

int main(int argc, char** argv) { return lph::run_cli(argc, argv); }
