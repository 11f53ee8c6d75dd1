#include "itb/cli.hpp"

int main(int argc, char** argv) { return itb::run_cli(argc, argv); }
