#include "smann/commands.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return smann::cli::run(argc, argv, std::cout, std::cerr);
}
