#include "cli.hpp"

int main(int argc, char** argv) { return wspectra::cli::run(argc, argv); }
