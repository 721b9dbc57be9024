#pragma once

#include <string>
#include <vector>

namespace oag::cli {

struct Result {
    int code = 0;
    std::string out;
};

/// args[0] is the command; stdin_text feeds `--file -`.
Result run(const std::vector<std::string>& args, const std::string& stdin_text = "");

}  // namespace oag::cli
