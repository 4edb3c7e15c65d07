#include <iostream>

#include "mfptmdp/cli/commands.hpp"

int main(int argc, char** argv) { return mfptmdp::cli::run(argc, argv, std::cout, std::cerr); }
