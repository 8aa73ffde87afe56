#include "stokeshape/harness.hpp"

int main(int argc, char** argv) { return stokeshape::run_cli(argc, argv); }
