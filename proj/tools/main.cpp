#include "commands.hpp"

int main(int argc, char** argv) { return estlab::cli::main(argc, argv); }
