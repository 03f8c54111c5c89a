#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rcmap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the arguments of an operation does not hold.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An enumeration or search would exceed its configured budget.
/// Raised instead of silently truncating work.
class BudgetExceeded : public Error {
public:
    BudgetExceeded(const std::string& what, std::uint64_t required, std::uint64_t budget)
        : Error(what + " (required " + std::to_string(required) + ", budget " +
                std::to_string(budget) + ")"),
          required_(required),
          budget_(budget) {}

    std::uint64_t required() const noexcept { return required_; }
    std::uint64_t budget() const noexcept { return budget_; }

private:
    std::uint64_t required_;
    std::uint64_t budget_;
};

/// An internal consistency check failed. Signals a bug or a misuse that
/// produced inconsistent mathematical objects.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

}  // namespace rcmap
