#include "run.hpp"

int main(int argc, char** argv) { return sempath::cli::main_entry(argc, argv); }
