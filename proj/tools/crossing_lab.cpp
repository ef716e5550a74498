#include "crossing/cli.hpp"

int main(int argc, char** argv) { return crossing::cli::main_entry(argc, argv); }
