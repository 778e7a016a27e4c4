#include "cli.hpp"

int main(int argc, char** argv) { return curvedray::cli::run(argc, argv); }
