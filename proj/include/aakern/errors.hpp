#pragma once

#include <stdexcept>
#include <string>

namespace aakern {

// Malformed or inconsistent input data (bad residue letters, missing
// columns, unresolvable identifiers, ...). CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure (singular solve, failed factorization, eigensolver
// trouble). CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace aakern
