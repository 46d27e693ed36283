#include "commands.hpp"

int main(int argc, char** argv) { return robustfl::cli::main(argc, argv); }
