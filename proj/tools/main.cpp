#include <iostream>

#include "sparse_ergm/cli.hpp"

int main(int argc, char** argv) { return sparse_ergm::cli::dispatch(argc, argv, std::cout, std::cerr); }
