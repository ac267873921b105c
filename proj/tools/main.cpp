#include "cli.hpp"

int main(int argc, char** argv) { return cproc::cli::run(argc, argv); }
