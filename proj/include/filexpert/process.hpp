#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace filexpert::process {

struct Result {
    int exit_code = 0;
    std::string out;
    std::string err;
};

// Runs argv[0] (looked up on PATH) with the given arguments in `cwd`, feeding
// `input` to its stdin and collecting stdout/stderr. No shell is involved.
Result run(const std::vector<std::string>& argv, const std::string& cwd = {},
           std::string_view input = {});

} // namespace filexpert::process
