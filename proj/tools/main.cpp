#include "macelast/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return macelast::cli::main(argc, argv, std::cout, std::cerr);
}
