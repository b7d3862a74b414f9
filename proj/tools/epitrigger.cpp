#include "epitrigger/cli.hpp"

int main(int argc, char** argv) { return epitrigger::cli_main(argc, argv); }
