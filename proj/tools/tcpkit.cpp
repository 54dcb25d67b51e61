#include "tcpkit/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return tcpkit::cli::run(argc, argv, std::cout, std::cerr); }
