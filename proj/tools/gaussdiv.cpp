#include <iostream>

#include "gaussdiv/cli.hpp"

int main(int argc, char ** argv)
{
    const std::vector<std::string> args(argv + 1, argv + argc);
    return gaussdiv::cli::run(args, std::cout, std::cerr);
}
