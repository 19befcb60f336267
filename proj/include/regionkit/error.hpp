#pragma once

#include <stdexcept>
#include <string>

namespace regionkit {

// Categories map one-to-one onto CLI exit codes.
enum class ErrorKind {
    input = 2,       // malformed or inconsistent input data
    infeasible = 3,  // valid input the pipeline cannot honor (e.g. disconnected graph)
    internal = 4,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

inline Error input_error(const std::string& what) { return {ErrorKind::input, what}; }
inline Error infeasible_error(const std::string& what) { return {ErrorKind::infeasible, what}; }
inline Error internal_error(const std::string& what) { return {ErrorKind::internal, what}; }

}  // namespace regionkit
