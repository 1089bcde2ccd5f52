#include <glbe/cli.hpp>

#include <iostream>

int main(int argc, char** argv) {
    const auto parsed = glbe::cli::parse(argc, argv, std::cout, std::cerr);
    if (!parsed.spec) return parsed.exit_code;
    return glbe::cli::execute(*parsed.spec, std::cout, std::cerr);
}
