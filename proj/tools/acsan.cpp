#include "acsan/cli.hpp"

int main(int argc, char** argv) { return acsan::run_cli(argc, argv); }
