#include <iostream>

#include "bamcbr/cli.hpp"

int main(int argc, char** argv)
{
    return bamcbr::cli::run_cli(argc, argv, std::cout, std::cerr);
}
