#include "catcluster/laurent.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace catcluster {

namespace modp {
uint64_t mul(uint64_t a, uint64_t b) {
    unsigned __int128 z = (unsigned __int128)a * b;
    uint64_t lo = uint64_t(z & P), hi = uint64_t(z >> 61);
    uint64_t r = lo + hi;
    return r >= P ? r - P : r;
}
uint64_t add(uint64_t a, uint64_t b) {
    uint64_t r = a + b;
    return r >= P ? r - P : r;
}
uint64_t pow(uint64_t a, uint64_t k) {
    uint64_t r = 1;
    while (k) {
        if (k & 1) r = mul(r, a);
        a = mul(a, a);
        k >>= 1;
    }
    return r;
}
uint64_t inv(uint64_t a) { return pow(a, P - 2); }
}  // namespace modp

namespace {

int lexcmp(const int32_t* a, const int32_t* b, size_t n) {
    for (size_t i = 0; i < n; ++i)
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return 0;
}

}  // namespace

LaurentPoly LaurentPoly::constant(size_t nvars, const Int& c) {
    LaurentPoly p(nvars);
    if (c != 0) {
        p.e_.assign(nvars, 0);
        p.c_.push_back(c);
    }
    return p;
}

LaurentPoly LaurentPoly::variable(size_t nvars, size_t v) {
    if (v >= nvars) throw IndexError("variable index out of range");
    std::vector<int> e(nvars, 0);
    e[v] = 1;
    return monomial(nvars, e);
}

LaurentPoly LaurentPoly::monomial(size_t nvars, const std::vector<int>& exps, const Int& c) {
    if (exps.size() != nvars) throw IndexError("exponent vector has wrong length");
    LaurentPoly p(nvars);
    if (c != 0) {
        p.e_.assign(exps.begin(), exps.end());
        p.c_.push_back(c);
    }
    return p;
}

LaurentPoly LaurentPoly::from_unsorted(size_t n, std::vector<int32_t>&& e, std::vector<Int>&& c) {
    std::vector<size_t> idx(c.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        return lexcmp(e.data() + a * n, e.data() + b * n, n) > 0;
    });
    LaurentPoly r(n);
    r.e_.reserve(e.size());
    r.c_.reserve(c.size());
    for (size_t k = 0; k < idx.size();) {
        size_t j = k;
        Int sum = 0;
        while (j < idx.size() && lexcmp(e.data() + idx[j] * n, e.data() + idx[k] * n, n) == 0) {
            sum += c[idx[j]];
            ++j;
        }
        if (sum != 0) {
            r.e_.insert(r.e_.end(), e.begin() + idx[k] * n, e.begin() + idx[k] * n + n);
            r.c_.push_back(std::move(sum));
        }
        k = j;
    }
    return r;
}

LaurentPoly LaurentPoly::operator+(const LaurentPoly& o) const {
    if (n_ != o.n_) throw IndexError("variable count mismatch");
    LaurentPoly r(n_);
    size_t i = 0, j = 0;
    while (i < size() || j < o.size()) {
        int cmp;
        if (i == size()) cmp = -1;
        else if (j == o.size()) cmp = 1;
        else cmp = lexcmp(exps(i), o.exps(j), n_);
        if (cmp > 0) {
            r.e_.insert(r.e_.end(), exps(i), exps(i) + n_);
            r.c_.push_back(c_[i++]);
        } else if (cmp < 0) {
            r.e_.insert(r.e_.end(), o.exps(j), o.exps(j) + n_);
            r.c_.push_back(o.c_[j++]);
        } else {
            Int s = c_[i] + o.c_[j];
            if (s != 0) {
                r.e_.insert(r.e_.end(), exps(i), exps(i) + n_);
                r.c_.push_back(std::move(s));
            }
            ++i;
            ++j;
        }
    }
    return r;
}

LaurentPoly LaurentPoly::operator-(const LaurentPoly& o) const {
    LaurentPoly neg = o;
    for (auto& c : neg.c_) c = -c;
    return *this + neg;
}

LaurentPoly LaurentPoly::operator*(const LaurentPoly& o) const {
    if (n_ != o.n_) throw IndexError("variable count mismatch");
    if (is_zero() || o.is_zero()) return LaurentPoly(n_);
    std::vector<int32_t> e;
    std::vector<Int> c;
    e.reserve(size() * o.size() * n_);
    c.reserve(size() * o.size());
    for (size_t i = 0; i < size(); ++i)
        for (size_t j = 0; j < o.size(); ++j) {
            const int32_t* a = exps(i);
            const int32_t* b = o.exps(j);
            for (size_t v = 0; v < n_; ++v) e.push_back(a[v] + b[v]);
            c.push_back(c_[i] * o.c_[j]);
        }
    return from_unsorted(n_, std::move(e), std::move(c));
}

LaurentPoly LaurentPoly::pow(unsigned k) const {
    LaurentPoly r = constant(n_, 1), b = *this;
    while (k) {
        if (k & 1) r = r * b;
        k >>= 1;
        if (k) b = b * b;
    }
    return r;
}

std::vector<int> LaurentPoly::min_exponents() const {
    std::vector<int> m(n_, 0);
    for (size_t t = 0; t < size(); ++t)
        for (size_t v = 0; v < n_; ++v) m[v] = t == 0 ? exps(t)[v] : std::min(m[v], int(exps(t)[v]));
    return m;
}

bool LaurentPoly::nonnegative_coefficients() const {
    return std::all_of(c_.begin(), c_.end(), [](const Int& c) { return c > 0; });
}

LaurentPoly LaurentPoly::divide_exact(const LaurentPoly& d) const {
    if (n_ != d.n_) throw IndexError("variable count mismatch");
    if (d.is_zero()) throw InvariantError("division by the zero polynomial");
    if (is_zero()) return LaurentPoly(n_);
    // Clear denominators on both sides, divide as polynomials, shift back.
    std::vector<int> ma = min_exponents(), mb = d.min_exponents();
    using Key = std::vector<int32_t>;
    std::map<Key, Int, std::greater<Key>> rem;
    for (size_t t = 0; t < size(); ++t) {
        Key k(exps(t), exps(t) + n_);
        for (size_t v = 0; v < n_; ++v) k[v] -= ma[v];
        rem.emplace(std::move(k), c_[t]);
    }
    std::vector<Key> dk(d.size());
    for (size_t t = 0; t < d.size(); ++t) {
        dk[t].assign(d.exps(t), d.exps(t) + n_);
        for (size_t v = 0; v < n_; ++v) dk[t][v] -= mb[v];
    }
    const Key& lead = dk[0];
    const Int& lc = d.c_[0];
    LaurentPoly q(n_);
    Key shift(n_), key(n_);
    while (!rem.empty()) {
        const Key& lt = rem.begin()->first;
        for (size_t v = 0; v < n_; ++v) {
            shift[v] = lt[v] - lead[v];
            if (shift[v] < 0) throw InvariantError("Laurent division left a nonzero remainder");
        }
        if (!mpz_divisible_p(rem.begin()->second.get_mpz_t(), lc.get_mpz_t()))
            throw InvariantError("Laurent division left a nonzero remainder");
        Int qc = rem.begin()->second / lc;
        for (size_t t = 0; t < dk.size(); ++t) {
            for (size_t v = 0; v < n_; ++v) key[v] = dk[t][v] + shift[v];
            auto it = rem.find(key);
            if (it == rem.end()) {
                rem.emplace(key, -(qc * d.c_[t]));
            } else {
                it->second -= qc * d.c_[t];
                if (it->second == 0) rem.erase(it);
            }
        }
        for (size_t v = 0; v < n_; ++v) q.e_.push_back(shift[v] + ma[v] - mb[v]);
        q.c_.push_back(qc);
    }
    return q;
}

uint64_t LaurentPoly::eval_mod(const std::vector<uint64_t>& point,
                               const std::vector<uint64_t>& inverse) const {
    uint64_t acc = 0;
    for (size_t t = 0; t < size(); ++t) {
        uint64_t term;
        if (c_[t] >= 0) {
            term = mpz_fdiv_ui(c_[t].get_mpz_t(), modp::P);
        } else {
            Int a = -c_[t];
            term = (modp::P - mpz_fdiv_ui(a.get_mpz_t(), modp::P)) % modp::P;
        }
        for (size_t v = 0; v < n_; ++v) {
            int e = exps(t)[v];
            if (e > 0) term = modp::mul(term, modp::pow(point[v], uint64_t(e)));
            else if (e < 0) term = modp::mul(term, modp::pow(inverse[v], uint64_t(-e)));
        }
        acc = modp::add(acc, term);
    }
    return acc;
}

std::string LaurentPoly::to_string(const std::vector<std::string>& names) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    for (size_t t = 0; t < size(); ++t) {
        Int c = c_[t];
        if (t > 0) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        if (c < 0) c = -c;
        bool any = false;
        std::ostringstream mon;
        for (size_t v = 0; v < n_; ++v) {
            int e = exps(t)[v];
            if (e == 0) continue;
            if (any) mon << "*";
            mon << (v < names.size() ? names[v] : "v" + std::to_string(v));
            if (e != 1) mon << "^" << e;
            any = true;
        }
        if (!any) os << c.get_str();
        else if (c == 1) os << mon.str();
        else os << c.get_str() << "*" << mon.str();
    }
    return os.str();
}

}  // namespace catcluster
