#include "chanstab/cli.hpp"

int main(int argc, char** argv) { return chanstab::run_cli(argc, argv); }
