#include <iostream>
#include <string>
#include <vector>

#include "ptdirac/cli.hpp"

int main(int argc, char** argv)
{
    return ptdirac::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
