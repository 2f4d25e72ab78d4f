#include "dwpf/harness/cli.hpp"

int main(int argc, char** argv) { return dwpf::harness::run_cli(argc, argv); }
