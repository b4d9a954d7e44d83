#pragma once

#include <stdexcept>
#include <string>

namespace optexec {

enum class ErrorKind {
    validity,  // model/penalty parameters violate a hard solvability condition
    solver,    // numerical solve aborted (second-order breach, step underflow)
    io,        // file / output errors
    invalid,   // malformed input (config text, schedule tables, bad arguments)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace optexec
