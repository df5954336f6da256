#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ifsynth {

// Base of every diagnostic the engine raises. `exit_code()` is the process
// status the command-line front end reports for it.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 1; }
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message)
        , line_(line)
        , column_(column)
    {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    int exit_code() const noexcept override { return 1; }

private:
    std::size_t line_;
    std::size_t column_;
};

class SemanticError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

// Local refinement found new predecessor states but could not make the
// abstraction any finer.
class RefinementStuck : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

// A function can run forever from some entry state.
class NonTermination : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 4; }
};

class StateCapExceeded : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 5; }
};

} // namespace ifsynth
