#pragma once

#include <stdexcept>
#include <string>

namespace filexpert {

// Errors carry a module-qualified code such as "history.BranchNotFound" so
// callers (and the CLI) can report them in a machine-readable form.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string kind, const std::string& message);

    const std::string& module() const noexcept { return module_; }
    const std::string& kind() const noexcept { return kind_; }
    std::string code() const { return module_ + "." + kind_; }

private:
    std::string module_;
    std::string kind_;
};

} // namespace filexpert
