#include <iostream>
#include <iterator>

#include "cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string in;
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--file" && args[i + 1] == "-") in.assign(std::istreambuf_iterator<char>(std::cin), {});
    auto r = oag::cli::run(args, in);
    std::cout << r.out;
    if (!r.out.empty() && r.out.back() != '\n') std::cout << '\n';
    return r.code;
}
