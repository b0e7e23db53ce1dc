#include "epdata/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return epdata::run_command({argv + 1, argv + argc}, std::cout, std::cerr);
}
