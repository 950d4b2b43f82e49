#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace catcluster {

using Int = mpz_class;
using Rat = mpq_class;

// Bad user input, unsupported family, out-of-range index.  CLI exit code 1.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IndexError : public DomainError {
public:
    using DomainError::DomainError;
};

// Something the mathematics says cannot happen did happen.  CLI exit code 2.
class InvariantError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A search ran out of budget before it could decide.
class IndeterminateError : public InvariantError {
public:
    using InvariantError::InvariantError;
};

// Solve M x = b over Q.  M is square, given row-major.  Returns false if M is singular.
bool solve_rational(const std::vector<std::vector<Rat>>& M, const std::vector<Rat>& b,
                    std::vector<Rat>& x);

// Budget override from CATCLUSTER_BUDGET, or `fallback` when unset or unparsable.
long long env_budget(long long fallback);

}  // namespace catcluster
