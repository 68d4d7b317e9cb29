#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bd {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& msg)
        : Error(line == 0 ? msg : "line " + std::to_string(line) + ": " + msg), line_(line) {}
    std::size_t line() const noexcept { return line_; }
    const char* kind() const noexcept override { return "parse"; }

private:
    std::size_t line_;
};

// A configured cap (enumeration size, node budget, ...) would be exceeded.
class BudgetError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "budget"; }
};

// A formula was handed to a class-specific routine but is not in that class.
class ClassMismatch : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "class_mismatch"; }
};

// An instance is not closed under an operation it was required to be closed under.
class ClosureError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "closure"; }
};

// A brancher broke its own output contract.
class ContractError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "contract"; }
};

class PreconditionError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "precondition"; }
};

// Tunable caps. Every routine that can blow up takes one of these.
struct Limits {
    std::size_t enum_vars = 24;              // assignment enumeration
    std::size_t oracle_vars = 16;            // SAT brute-force oracle
    std::uint64_t csp_space = 20'000'000;    // d^|V| for exhaustive CSP solving
    std::uint64_t family_size = 1'000'000;   // property-constrained operation enumeration
    std::size_t partition_constraints = 16;  // 2^|C| partitions
    std::uint64_t poly_nodes = 20'000'000;   // search nodes per polymorphism query
    std::size_t oracle_csp_vars = 10;        // CSP brute-force oracle
    int oracle_csp_domain = 3;
};

}  // namespace bd
