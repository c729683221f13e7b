#include <iostream>
#include <string>
#include <vector>

#include "vulnrank/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    return vulnrank::cli::run(args, std::cout, std::cerr);
}
