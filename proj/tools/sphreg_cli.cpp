#include "sphreg/io/cli.hpp"

int main(int argc, char** argv) { return sphreg::io::run_cli(argc, argv); }
