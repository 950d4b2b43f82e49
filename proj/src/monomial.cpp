#include "catcluster/monomial.hpp"

#include <cctype>
#include <sstream>

#include "catcluster/arith.hpp"

namespace catcluster {

Monomial Monomial::letter(int i, int p, int mult) {
    Monomial m;
    m.add({i, p}, mult);
    return m;
}

int Monomial::exponent(const Letter& l) const {
    auto it = f_.find(l);
    return it == f_.end() ? 0 : it->second;
}

int Monomial::degree() const {
    int d = 0;
    for (auto& [l, k] : f_) d += k;
    return d;
}

void Monomial::add(const Letter& l, int k) {
    if (k == 0) return;
    int v = exponent(l) + k;
    if (v < 0) throw DomainError("monomial exponent would become negative");
    if (v == 0) f_.erase(l);
    else f_[l] = v;
}

Monomial Monomial::operator*(const Monomial& o) const {
    Monomial r = *this;
    for (auto& [l, k] : o.f_) r.f_[l] += k;
    return r;
}

Monomial Monomial::pow(int k) const {
    if (k < 0) throw DomainError("negative monomial power");
    Monomial r;
    if (k == 0) return r;
    r = *this;
    for (auto& [l, v] : r.f_) v *= k;
    return r;
}

std::optional<Monomial> Monomial::divide(const Monomial& b) const {
    Monomial r = *this;
    for (auto& [l, k] : b.f_) {
        int v = r.exponent(l) - k;
        if (v < 0) return std::nullopt;
        if (v == 0) r.f_.erase(l);
        else r.f_[l] = v;
    }
    return r;
}

Monomial Monomial::shifted(int dp) const {
    Monomial r;
    for (auto& [l, k] : f_) r.f_[{l.first, l.second + dp}] = k;
    return r;
}

namespace {

bool parse_int(const std::string& s, size_t& pos, long& out) {
    size_t start = pos;
    if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
    size_t digits = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == digits) return false;
    out = std::stol(s.substr(start, pos - start));
    return true;
}

}  // namespace

Monomial parse_monomial(const std::string& text) {
    Monomial m;
    size_t pos = 0;
    auto skip = [&] {
        while (pos < text.size() && (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == '*')) ++pos;
    };
    skip();
    while (pos < text.size()) {
        size_t tok = pos;
        long i, p, e = 1;
        if (!parse_int(text, pos, i) || pos >= text.size() || text[pos] != '_')
            throw DomainError("malformed monomial term at offset " + std::to_string(tok) + ": '" + text + "'");
        ++pos;
        if (!parse_int(text, pos, p))
            throw DomainError("malformed monomial term at offset " + std::to_string(tok) + ": '" + text + "'");
        if (pos < text.size() && text[pos] == '^') {
            ++pos;
            if (pos < text.size() && (text[pos] == '-' || text[pos] == '+'))
                throw DomainError("monomial exponents must be positive: '" + text + "'");
            if (!parse_int(text, pos, e))
                throw DomainError("malformed exponent in monomial '" + text + "'");
            if (e <= 0) throw DomainError("monomial exponents must be positive: '" + text + "'");
        }
        if (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) && text[pos] != '*')
            throw DomainError("malformed monomial term at offset " + std::to_string(tok) + ": '" + text + "'");
        m.add({int(i), int(p)}, int(e));
        skip();
    }
    return m;
}

static std::string format_with(const Monomial& m, const char* sep) {
    std::ostringstream os;
    bool first = true;
    for (auto& [l, k] : m.factors()) {
        if (!first) os << sep;
        first = false;
        os << l.first << "_" << l.second;
        if (k > 1) os << "^" << k;
    }
    return os.str();
}

std::string format_monomial(const Monomial& m) { return format_with(m, " "); }
std::string format_monomial_token(const Monomial& m) { return m.empty() ? "1" : format_with(m, "*"); }

}  // namespace catcluster
