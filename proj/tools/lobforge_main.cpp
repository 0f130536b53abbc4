#include "lobforge/cli/cli.hpp"

int main(int argc, char** argv) { return lobforge::cli::run(argc, argv); }
