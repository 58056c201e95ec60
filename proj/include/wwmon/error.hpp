#pragma once

#include <stdexcept>
#include <string>

namespace wwmon {

// Data or numeric failure raised by a module. what() is prefixed with the
// module name so the CLI can surface it unchanged.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& message)
        : std::runtime_error(module + ": " + message), module_(std::move(module)) {}

    [[nodiscard]] const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

}  // namespace wwmon
