#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace tsnorm {

// Library-wide exception. `code` is a short machine-readable slug; the CLI
// prints it verbatim on the diagnostic stream and maps it to exit code 2.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(msg), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(std::string code, const std::string& msg) {
    throw Error(std::move(code), msg);
}

} // namespace tsnorm
