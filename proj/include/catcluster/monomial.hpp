#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

namespace catcluster {

// A letter i_p, i.e. the pair (Dynkin node i, spectral exponent p).
using Letter = std::pair<int, int>;

// Finite multiset of letters.  All stored multiplicities are positive;
// the empty monomial stands for the trivial module.
class Monomial {
public:
    Monomial() = default;
    static Monomial letter(int i, int p, int mult = 1);

    const std::map<Letter, int>& factors() const { return f_; }
    int exponent(const Letter& l) const;
    bool empty() const { return f_.empty(); }
    int degree() const;

    Monomial operator*(const Monomial& o) const;
    Monomial pow(int k) const;
    // a / b when it is a genuine monomial, nullopt otherwise.
    std::optional<Monomial> divide(const Monomial& b) const;
    bool divisible_by(const Monomial& b) const { return divide(b).has_value(); }
    Monomial shifted(int dp) const;
    // Multiply in i_p^k; k may be negative as long as the result stays genuine.
    void add(const Letter& l, int k);

    bool operator==(const Monomial& o) const { return f_ == o.f_; }
    bool operator!=(const Monomial& o) const { return f_ != o.f_; }
    bool operator<(const Monomial& o) const { return f_ < o.f_; }

private:
    std::map<Letter, int> f_;
};

// Grammar: term := <int>_<int> ('^' <uint>)?, terms separated by whitespace or '*'.
Monomial parse_monomial(const std::string& text);
// Terms sorted by (i,p), separated by one space, caret only when the multiplicity exceeds 1.
std::string format_monomial(const Monomial& m);
// Same, but '*' separated so the result is a single token.
std::string format_monomial_token(const Monomial& m);

}  // namespace catcluster
