#include <iostream>

#include "delaymid/cli.hpp"

int main(int argc, char** argv) { return delaymid::cli::main_entry(argc, argv, std::cout, std::cerr); }
