#include <iostream>

#include "app.hpp"

int main(int argc, char** argv) { return pcf::cli::main_entry(argc, argv, std::cout, std::cerr); }
