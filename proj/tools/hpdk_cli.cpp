#include <iostream>

#include <hpdk/cli.hpp>

int main(int argc, char** argv) { return hpdk::cli::run(argc, argv, std::cout, std::cerr); }
