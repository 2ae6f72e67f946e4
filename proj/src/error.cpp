#include "filexpert/error.hpp"

namespace filexpert {

Error::Error(std::string module, std::string kind, const std::string& message)
    : std::runtime_error(message), module_(std::move(module)), kind_(std::move(kind)) {}

} // namespace filexpert
