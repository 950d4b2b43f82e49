#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "catcluster/arith.hpp"

namespace catcluster {

// Multivariate Laurent polynomial over Z in a fixed number of variables.
// Terms are kept sorted in strictly decreasing lex order of exponent vectors,
// with no zero coefficients, so equal polynomials have equal representations.
class LaurentPoly {
public:
    explicit LaurentPoly(size_t nvars = 0) : n_(nvars) {}

    static LaurentPoly constant(size_t nvars, const Int& c);
    static LaurentPoly variable(size_t nvars, size_t v);
    static LaurentPoly monomial(size_t nvars, const std::vector<int>& exps, const Int& c = 1);

    size_t nvars() const { return n_; }
    size_t size() const { return c_.size(); }
    bool is_zero() const { return c_.empty(); }
    const int32_t* exps(size_t t) const { return e_.data() + t * n_; }
    const Int& coef(size_t t) const { return c_[t]; }

    LaurentPoly operator+(const LaurentPoly& o) const;
    LaurentPoly operator-(const LaurentPoly& o) const;
    LaurentPoly operator*(const LaurentPoly& o) const;
    LaurentPoly pow(unsigned k) const;
    bool operator==(const LaurentPoly& o) const { return n_ == o.n_ && e_ == o.e_ && c_ == o.c_; }
    bool operator!=(const LaurentPoly& o) const { return !(*this == o); }

    // Exact quotient this / d.  Throws InvariantError if d does not divide.
    LaurentPoly divide_exact(const LaurentPoly& d) const;

    // Per-variable minimum exponent over all terms (0 for the zero polynomial).
    std::vector<int> min_exponents() const;
    bool nonnegative_coefficients() const;

    // Value modulo 2^61-1 at a point with nonzero coordinates.
    uint64_t eval_mod(const std::vector<uint64_t>& point, const std::vector<uint64_t>& inverse) const;

    std::string to_string(const std::vector<std::string>& names) const;

private:
    size_t n_;
    std::vector<int32_t> e_;
    std::vector<Int> c_;

    static LaurentPoly from_unsorted(size_t n, std::vector<int32_t>&& e, std::vector<Int>&& c);
};

namespace modp {
constexpr uint64_t P = (uint64_t(1) << 61) - 1;
uint64_t mul(uint64_t a, uint64_t b);
uint64_t add(uint64_t a, uint64_t b);
uint64_t pow(uint64_t a, uint64_t k);
uint64_t inv(uint64_t a);
}  // namespace modp

}  // namespace catcluster
