#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <mso/nat.hpp>

namespace mso {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Lexical or grammatical problem in an input file; positions are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line, int column)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                message),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// Structurally well-formed input that violates a semantic requirement.
class ValidationError : public Error {
public:
    using Error::Error;
};

// The automaton accepts no string at all (nothing useful survives trimming).
class EmptyLanguageError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class OutOfBoundsError : public Error {
public:
    OutOfBoundsError(Nat index, Nat total)
        : Error("out-of-bounds: index " + index.to_decimal() + " > count " + total.to_decimal()),
          index_(std::move(index)),
          total_(std::move(total)) {}

    const Nat& index() const { return index_; }
    const Nat& total() const { return total_; }

private:
    Nat index_;
    Nat total_;
};

// A configured resource ceiling was hit (oracle search space, bench budget).
class BudgetError : public Error {
public:
    using Error::Error;
};

// Runtime failure of an editing rule (position out of range, wrong operand).
class EditError : public Error {
public:
    EditError(const std::string& message, std::size_t rule_index)
        : Error("rule " + std::to_string(rule_index + 1) + ": " + message),
          rule_index_(rule_index) {}

    std::size_t rule_index() const { return rule_index_; }

private:
    std::size_t rule_index_;
};

}  // namespace mso
