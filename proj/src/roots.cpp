#include "catcluster/roots.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

namespace catcluster {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\n\r"), b = s.find_last_not_of(" \t\n\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

RootVec unit(size_t dim, int i, long long c = 1) {
    RootVec v(dim, 0);
    v[size_t(i)] = c;
    return v;
}

RootVec add(const RootVec& a, const RootVec& b, long long s = 1) {
    RootVec r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] += s * b[i];
    return r;
}

bool nonneg(const RootVec& v) {
    return std::all_of(v.begin(), v.end(), [](long long x) { return x >= 0; });
}

bool is_zero(const RootVec& v) {
    return std::all_of(v.begin(), v.end(), [](long long x) { return x == 0; });
}

std::vector<std::vector<int>> cartan_from_edges(size_t dim, const std::vector<std::pair<int, int>>& e, int offset) {
    std::vector<std::vector<int>> C(dim, std::vector<int>(dim, 0));
    for (size_t i = 0; i < dim; ++i) C[i][i] = 2;
    for (auto [a, b] : e) {
        C[size_t(a - offset)][size_t(b - offset)] = -1;
        C[size_t(b - offset)][size_t(a - offset)] = -1;
    }
    return C;
}

int sign_of(const Rat& r) { return mpq_sgn(r.get_mpq_t()); }

}  // namespace

RootVec parse_rootvec(const std::string& text, size_t dim, const RootVec& delta) {
    std::string s = trim(text);
    bool symbolic = false;
    for (char ch : s)
        if (std::isalpha(static_cast<unsigned char>(ch)) || (static_cast<unsigned char>(ch) & 0x80)) symbolic = true;
    RootVec v(dim, 0);
    if (!symbolic) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        for (std::string p; std::getline(ss, p, ',');) parts.push_back(trim(p));
        if (parts.size() != dim)
            throw DomainError("root vector '" + text + "' has " + std::to_string(parts.size()) +
                              " coordinates, expected " + std::to_string(dim));
        for (size_t i = 0; i < dim; ++i) {
            size_t used = 0;
            try {
                v[i] = std::stoll(parts[i], &used);
            } catch (...) {
                used = 0;
            }
            if (used == 0 || used != parts[i].size()) throw DomainError("bad coordinate '" + parts[i] + "'");
        }
        return v;
    }
    // Symbolic: sum of [coef][*](d | δ | a<i> | α<i> | alpha<i>).
    size_t pos = 0;
    auto skip = [&] {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    };
    auto fail = [&] { throw DomainError("malformed root expression '" + text + "'"); };
    bool first = true;
    while (true) {
        skip();
        if (pos >= s.size()) break;
        long long sign = 1;
        if (s[pos] == '+' || s[pos] == '-') {
            sign = s[pos] == '-' ? -1 : 1;
            ++pos;
            skip();
        } else if (!first) {
            fail();
        }
        first = false;
        long long coef = 1;
        if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            size_t st = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            coef = std::stoll(s.substr(st, pos - st));
            skip();
            if (pos < s.size() && s[pos] == '*') {
                ++pos;
                skip();
            }
        }
        auto starts = [&](const char* w) { return s.compare(pos, std::char_traits<char>::length(w), w) == 0; };
        if (starts("δ") || starts("delta") || (pos < s.size() && s[pos] == 'd')) {
            pos += starts("δ") ? std::string("δ").size() : (starts("delta") ? 5 : 1);
            v = add(v, delta, sign * coef);
            continue;
        }
        if (starts("α")) pos += std::string("α").size();
        else if (starts("alpha")) pos += 5;
        else if (pos < s.size() && s[pos] == 'a') pos += 1;
        else fail();
        if (pos < s.size() && s[pos] == '_') ++pos;
        size_t st = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (st == pos) fail();
        long long idx = std::stoll(s.substr(st, pos - st));
        if (idx < 0 || size_t(idx) >= dim) throw DomainError("simple root index out of range in '" + text + "'");
        v[size_t(idx)] += sign * coef;
    }
    if (first) fail();
    return v;
}

std::string format_rootvec(const RootVec& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s;
}

std::vector<std::pair<int, int>> finite_edges(const FiniteType& t) {
    std::vector<std::pair<int, int>> e;
    if (t.type == 'A') {
        if (t.n < 1) throw DomainError("A_n needs n >= 1");
        for (int i = 1; i < t.n; ++i) e.push_back({i, i + 1});
    } else if (t.type == 'D') {
        if (t.n < 4) throw DomainError("D_n needs n >= 4");
        e = {{1, 3}, {2, 3}};
        for (int i = 3; i < t.n; ++i) e.push_back({i, i + 1});
    } else if (t.type == 'E') {
        if (t.n < 6 || t.n > 8) throw DomainError("E_n needs n in {6,7,8}");
        e = {{1, 2}, {2, 3}, {3, 5}, {5, 6}, {3, 4}};
        if (t.n >= 7) e.push_back({6, 7});
        if (t.n >= 8) e.push_back({7, 8});
    } else {
        throw DomainError("unsupported finite type");
    }
    return e;
}

std::vector<RootVec> finite_positive_roots(const FiniteType& t) {
    auto e = finite_edges(t);
    const size_t dim = size_t(t.n) + 1;
    auto C = cartan_from_edges(size_t(t.n), e, 1);
    std::set<RootVec> roots;
    std::vector<RootVec> frontier;
    for (int i = 1; i <= t.n; ++i) frontier.push_back(unit(dim, i));
    roots.insert(frontier.begin(), frontier.end());
    // Close under beta -> beta + alpha_i whenever <h_i, beta> < 0, i.e. s_i beta > beta.
    while (!frontier.empty()) {
        std::vector<RootVec> next;
        for (const RootVec& r : frontier)
            for (int i = 1; i <= t.n; ++i) {
                long long h = 0;
                for (int j = 1; j <= t.n; ++j) h += C[size_t(i - 1)][size_t(j - 1)] * r[size_t(j)];
                if (h >= 0) continue;
                RootVec s = r;
                s[size_t(i)] -= h;
                if (roots.insert(s).second) next.push_back(s);
            }
        frontier = std::move(next);
    }
    return {roots.begin(), roots.end()};
}

namespace {

RootVec finite_reflect(const std::vector<std::vector<int>>& C, int i, const RootVec& v) {
    long long h = 0;
    for (size_t j = 1; j < v.size(); ++j) h += C[size_t(i - 1)][j - 1] * v[j];
    RootVec r = v;
    r[size_t(i)] -= h;
    return r;
}

}  // namespace

bool word_product_is_w0(const FiniteType& t, const std::vector<int>& word) {
    auto C = cartan_from_edges(size_t(t.n), finite_edges(t), 1);
    for (int i : word)
        if (i < 1 || i > t.n) throw DomainError("letter " + std::to_string(i) + " is not a node of the finite type");
    for (RootVec r : finite_positive_roots(t)) {
        for (auto it = word.rbegin(); it != word.rend(); ++it) r = finite_reflect(C, *it, r);
        if (std::any_of(r.begin(), r.end(), [](long long x) { return x > 0; })) return false;
    }
    return true;
}

int longest_length(const FiniteType& t) { return int(finite_positive_roots(t).size()); }

int coxeter_number(const FiniteType& t) {
    switch (t.type) {
        case 'A': return t.n + 1;
        case 'D': return 2 * t.n - 2;
        case 'E': return t.n == 6 ? 12 : (t.n == 7 ? 18 : 30);
    }
    throw DomainError("unsupported finite type");
}

AffineSystem AffineSystem::make(const AffineTag& tag) {
    AffineSystem s;
    s.tag = tag;
    auto e = affine_edges(tag);
    const size_t dim = size_t(tag.n) + 1;
    s.cartan = cartan_from_edges(dim, e, 0);
    RootVec d(dim, 0);
    if (tag.type == 'D') {
        d[0] = d[1] = d[2] = d[size_t(tag.n)] = 1;
        for (int i = 3; i < tag.n; ++i) d[size_t(i)] = 2;
    } else if (tag.n == 6) {
        d = {1, 1, 2, 3, 2, 2, 1};
    } else if (tag.n == 7) {
        d = {1, 2, 3, 4, 2, 3, 2, 1};
    } else {
        d = {1, 2, 4, 6, 3, 5, 4, 3, 2};
    }
    s.delta = d;
    for (size_t i = 0; i < dim; ++i)
        if (s.pairing(int(i), d) != 0) throw InvariantError("null root is not in the radical for " + tag.name());
    return s;
}

long long AffineSystem::pairing(int i, const RootVec& v) const {
    if (v.size() != dim()) throw DomainError("root vector has wrong dimension for " + tag.name());
    long long h = 0;
    for (size_t j = 0; j < dim(); ++j) h += cartan[size_t(i)][j] * v[j];
    return h;
}

RootVec simple_reflect(const AffineSystem& sys, int i, const RootVec& v) {
    if (i < 0 || size_t(i) >= sys.dim()) throw IndexError("node index out of range");
    RootVec r = v;
    r[size_t(i)] -= sys.pairing(i, v);
    return r;
}

bool is_real_root(const AffineSystem& sys, const RootVec& v) {
    static std::map<std::pair<char, int>, std::set<RootVec>> cache;
    auto key = std::make_pair(sys.tag.type, sys.tag.n);
    auto it = cache.find(key);
    if (it == cache.end()) {
        auto pos = finite_positive_roots(sys.finite());
        std::set<RootVec> all(pos.begin(), pos.end());
        for (auto r : pos) {
            for (auto& x : r) x = -x;
            all.insert(r);
        }
        it = cache.emplace(key, std::move(all)).first;
    }
    if (v.size() != sys.dim()) return false;
    RootVec b = add(v, sys.delta, -v[0]);
    return it->second.count(b) > 0;
}

RootVec CoxeterElement::apply(const AffineSystem& sys, const RootVec& v) const {
    RootVec r = v;
    for (auto it = order.rbegin(); it != order.rend(); ++it) r = simple_reflect(sys, *it, r);
    return r;
}

CoxeterElement coxeter_from_matrix(const ExchangeMatrix& B) {
    auto ex = B.exchangeable();
    std::vector<size_t> rem = ex;
    CoxeterElement c;
    while (!rem.empty()) {
        auto src = std::find_if(rem.begin(), rem.end(), [&](size_t u) {
            return std::all_of(rem.begin(), rem.end(), [&](size_t w) { return B.b[w][u] <= 0; });
        });
        if (src == rem.end()) throw DomainError("principal quiver has an oriented cycle");
        c.order.push_back(int(*src));
        rem.erase(src);
    }
    return c;
}

OrbitResult c_orbit_classify(const AffineSystem& sys, const CoxeterElement& c, const RootVec& beta, int step_cap) {
    RootVec x = beta;
    for (int k = 1; k <= step_cap; ++k) {
        x = c.apply(sys, x);
        if (x == beta) return {true, k, step_cap};
    }
    return {false, 0, step_cap};
}

int default_orbit_cap(const AffineSystem& sys) { return 10 * int(sys.dim()); }

std::vector<std::vector<RootVec>> lambda_components(const AffineTag& tag) {
    AffineSystem sys = AffineSystem::make(tag);
    const size_t dim = sys.dim();
    const int n = tag.n;
    auto alpha = [&](std::initializer_list<std::pair<int, int>> terms) {
        RootVec v(dim, 0);
        for (auto [i, c] : terms) v[size_t(i)] += c;
        return v;
    };
    std::vector<RootVec> beta(size_t(n) + 1);  // beta[1..]
    int c1 = 0, c2lo = 0, c2hi = 0, c3 = 0;
    if (tag.type == 'D') {
        const int m = (n - 1) / 2;
        for (int i = 1; i < m; ++i) beta[size_t(i)] = alpha({{n - 2 * i, 1}, {n + 1 - 2 * i, 1}});
        beta[size_t(m)] = alpha({{1, 1}, {2, 1}, {3, 1}});
        for (int j = m + 1; j <= n - 3; ++j) beta[size_t(j)] = alpha({{2 * j + 3 - n, 1}, {2 * j + 4 - n, 1}});
        RootVec b1(dim, 0), b2(dim, 0);
        b1[1] = 1;
        b2[2] = 1;
        for (int i = 3; i <= n; ++i) b1[size_t(i)] = b2[size_t(i)] = 1;
        beta[size_t(n - 2)] = b1;
        beta[size_t(n - 1)] = b2;
        c1 = n - 3;
        c2lo = c2hi = n - 2;
        c3 = n - 1;
    } else if (tag.type == 'E' && n == 6) {
        beta[1] = alpha({{2, 1}, {3, 1}, {5, 1}, {6, 1}});
        beta[2] = alpha({{1, 1}, {2, 1}, {3, 1}, {4, 1}});
        beta[3] = alpha({{1, 1}, {2, 1}, {3, 1}, {5, 1}});
        beta[4] = alpha({{3, 1}, {4, 1}, {5, 1}, {6, 1}});
        beta[5] = alpha({{2, 1}, {3, 2}, {4, 1}, {5, 1}});
    } else if (tag.type == 'E' && n == 7) {
        beta[1] = alpha({{1, 1}, {2, 1}, {3, 1}, {5, 1}});
        beta[2] = alpha({{3, 1}, {4, 1}, {5, 1}, {6, 1}, {7, 1}});
        beta[3] = alpha({{2, 1}, {3, 1}, {5, 1}, {6, 1}});
        beta[4] = alpha({{1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}, {6, 1}});
        beta[5] = alpha({{2, 1}, {3, 2}, {4, 1}, {5, 1}});
        beta[6] = alpha({{1, 1}, {2, 2}, {3, 2}, {4, 1}, {5, 1}, {6, 1}, {7, 1}});
    } else if (tag.type == 'E' && n == 8) {
        beta[1] = alpha({{1, 1}, {2, 1}, {3, 1}, {5, 1}, {6, 1}, {7, 1}});
        beta[2] = alpha({{2, 1}, {3, 2}, {4, 1}, {5, 1}});
        beta[3] = alpha({{1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}, {6, 1}});
        beta[4] = alpha({{2, 1}, {3, 1}, {5, 1}, {6, 1}, {7, 1}, {8, 1}});
        beta[5] = alpha({{2, 1}, {3, 2}, {4, 1}, {5, 2}, {6, 2}, {7, 1}});
        beta[6] = alpha({{1, 1}, {2, 1}, {3, 2}, {4, 1}, {5, 2}, {6, 1}, {7, 1}, {8, 1}});
        beta[7] = alpha({{1, 1}, {2, 2}, {3, 3}, {4, 2}, {5, 2}, {6, 2}, {7, 2}, {8, 1}});
    } else {
        throw DomainError("finite-orbit lists are only available for D_n^(1) and E_n^(1)");
    }
    if (tag.type == 'E') {
        c1 = n - 4;
        c2lo = n - 3;
        c2hi = n - 2;
        c3 = n - 1;
    }
    auto component = [&](int lo, int hi) {
        std::vector<RootVec> out;
        for (int k = lo; k <= hi; ++k)
            for (int l = k; l <= hi; ++l) {
                RootVec s(dim, 0);
                for (int i = k; i <= l; ++i) s = add(s, beta[size_t(i)]);
                out.push_back(s);
                out.push_back(add(sys.delta, s, -1));
            }
        return out;
    };
    return {component(1, c1), component(c2lo, c2hi), component(c3, c3)};
}

RootVec Expansion::sum(const RootVec& delta_vec) const {
    RootVec s(delta_vec.size(), 0);
    s = add(s, delta_vec, delta);
    for (auto& [r, m] : real) s = add(s, r, m);
    return s;
}

FanContext::FanContext(AffineSystem sys, ExchangeMatrix principal) : sys_(std::move(sys)), B_(std::move(principal)) {
    B_.validate();
    if (B_.size() != sys_.dim() || !B_.frozen_nodes().empty())
        throw DomainError("fan context needs a principal matrix on all affine nodes");
    if (!principal_acyclic(B_)) throw DomainError("fan context needs an acyclic principal quiver");
    c_ = coxeter_from_matrix(B_);
    lambda_ = lambda_components(sys_.tag);
}

void FanContext::set_budget_override(std::optional<long long> b) {
    budget_override_ = b;
    compat_cache_.clear();
    real_cache_.clear();
    cand_cache_.clear();
    oracle_compat_.clear();
}

bool FanContext::in_lambda(const RootVec& v) const {
    for (auto& comp : lambda_)
        if (std::find(comp.begin(), comp.end(), v) != comp.end()) return true;
    return false;
}

bool FanContext::in_phi_c_re(const RootVec& v) const {
    if (v.size() != sys_.dim()) return false;
    for (size_t i = 0; i < v.size(); ++i)
        if (v == unit(v.size(), int(i), -1)) return true;
    if (in_lambda(v)) return true;
    if (!nonneg(v) || is_zero(v) || !is_real_root(sys_, v)) return false;
    return !c_orbit_classify(sys_, c_, v, default_orbit_cap(sys_)).finite;
}

long long FanContext::defect(const RootVec& v) const {
    long long s = 0;
    const auto& d = sys_.delta;
    for (size_t i = 0; i < d.size(); ++i) {
        s += d[i] * v[i];
        for (size_t j = 0; j < d.size(); ++j)
            if (B_.b[i][j] > 0) s -= d[i] * B_.b[i][j] * v[j];
    }
    return s;
}

long long FanContext::budget_for(const RootVec& gamma) const {
    if (budget_override_) return *budget_override_;
    long long h = 0;
    for (long long x : gamma) h += x < 0 ? -x : x;
    return env_budget(64 * (1 + h));
}

namespace {

using I128 = __int128;

Int to_int(I128 v) {
    bool neg = v < 0;
    unsigned __int128 u = neg ? -(unsigned __int128)v : (unsigned __int128)v;
    Int hi(static_cast<unsigned long>(uint64_t(u >> 64))), lo(static_cast<unsigned long>(uint64_t(u)));
    Int r = (hi << 64) + lo;
    return neg ? Int(-r) : r;
}

Rat ratio(I128 num, I128 den, long scale = 1) {
    Rat r(to_int(num), to_int(den) * scale);
    r.canonicalize();
    return r;
}

// Walk state: current matrix, d-tuple (row = current d-vector at that node) and word.
struct WalkState {
    ExchangeMatrix B;
    DVectorTuple D;
    std::vector<int> word;
    std::set<DVectorTuple> seen;

    bool revisit() {
        DVectorTuple key = D;
        std::sort(key.begin(), key.end());
        return !seen.insert(key).second;
    }
    void mutate(size_t k) {
        D = d_tuple_mutate(D, B, k);
        B = matrix_mutate(B, k);
        word.push_back(int(k));
    }
    // Fraction-free elimination on D^T with several integer right-hand sides.
    // On success X[k][i] / det is coordinate i of rhs k.  False on overflow.
    bool solve_int(const std::vector<std::vector<I128>>& rhs, I128& det, std::vector<std::vector<I128>>& X) const {
        const size_t n = D.size(), m = rhs.size();
        std::vector<std::vector<I128>> A(n, std::vector<I128>(n + m));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) A[j][i] = D[i][j];
        for (size_t k = 0; k < m; ++k)
            for (size_t j = 0; j < n; ++j) A[j][n + k] = rhs[k][j];
        I128 prev = 1;
        for (size_t k = 0; k < n; ++k) {
            size_t r = k;
            while (r < n && A[r][k] == 0) ++r;
            if (r == n) return false;
            std::swap(A[r], A[k]);
            for (size_t i = k + 1; i < n; ++i) {
                for (size_t j = k + 1; j < n + m; ++j) {
                    I128 x, y;
                    if (__builtin_mul_overflow(A[i][j], A[k][k], &x) || __builtin_mul_overflow(A[i][k], A[k][j], &y) ||
                        __builtin_sub_overflow(x, y, &x))
                        return false;
                    A[i][j] = x / prev;
                }
                A[i][k] = 0;
            }
            prev = A[k][k];
        }
        det = prev;
        X.assign(m, std::vector<I128>(n));
        for (size_t k = 0; k < m; ++k)
            for (size_t ii = n; ii-- > 0;) {
                I128 acc;
                if (__builtin_mul_overflow(det, A[ii][n + k], &acc)) return false;
                for (size_t j = ii + 1; j < n; ++j) {
                    I128 t;
                    if (__builtin_mul_overflow(A[ii][j], X[k][j], &t) || __builtin_sub_overflow(acc, t, &acc)) return false;
                }
                X[k][ii] = acc / A[ii][ii];
            }
        return true;
    }
    std::vector<Rat> solve(const std::vector<Rat>& rhs) const {
        const size_t n = D.size();
        std::vector<std::vector<Rat>> M(n, std::vector<Rat>(n));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) M[j][i] = D[i][j];
        std::vector<Rat> x;
        if (!solve_rational(M, rhs, x)) {
            std::string path;
            for (int k : word) path += std::to_string(k) + " ";
            throw InvariantError("singular d-vector basis after mutations [" + trim(path) + "]");
        }
        return x;
    }
};

std::optional<RealExpansion> accept(const WalkState& st, const std::vector<Rat>& c) {
    RealExpansion r;
    r.word = st.word;
    for (size_t i = 0; i < c.size(); ++i) {
        if (c[i].get_den() != 1) return std::nullopt;
        if (c[i] == 0) continue;
        RootVec d(st.D[i].begin(), st.D[i].end());
        r.coeffs[d] += c[i].get_num().get_si();
    }
    return r;
}

}  // namespace

std::optional<RealExpansion> FanContext::ray_walk(const RootVec& gamma, bool same_side, long long budget) const {
    const size_t n = sys_.dim();
    long long s = defect(gamma);
    // Wanted sign of the start point's defect.
    int want = same_side ? (s > 0 ? 1 : -1) : (s > 0 ? -1 : 1);
    std::vector<Rat> w(n);
    for (size_t j = 0; j < n; ++j) w[j] = Rat(1) + Rat(long(j + 1), 97);
    auto start_defect = [&] {
        Rat acc = 0;
        for (size_t i = 0; i < n; ++i) {
            acc -= Rat(long(sys_.delta[i])) * w[i];
            for (size_t j = 0; j < n; ++j)
                if (B_.b[i][j] > 0) acc += Rat(long(sys_.delta[i] * B_.b[i][j])) * w[j];
        }
        return acc;
    };
    bool ok = false;
    for (int round = 0; round < 64; ++round) {
        int d0 = sign_of(start_defect());
        if (d0 == want) {
            ok = true;
            break;
        }
        bool scaled = false;
        for (size_t i = 0; i < n; ++i) {
            long long e = defect(unit(n, int(i), -1));
            if ((e > 0 ? 1 : (e < 0 ? -1 : 0)) == want) {
                w[i] *= 2;
                scaled = true;
            }
        }
        if (!scaled) break;
    }
    if (!ok) return std::nullopt;
    std::vector<Rat> p0(n), dir(n);
    for (size_t j = 0; j < n; ++j) {
        p0[j] = -w[j];
        dir[j] = Rat(long(gamma[j])) - p0[j];
    }
    // The same two right-hand sides scaled by 97 to clear denominators, when they fit.
    std::vector<std::vector<I128>> irhs(2, std::vector<I128>(n));
    bool int_ok = true;
    for (size_t j = 0; j < n && int_ok; ++j) {
        Rat W = w[j] * 97;
        if (W.get_den() != 1 || !W.get_num().fits_slong_p()) int_ok = false;
        else {
            irhs[0][j] = -I128(W.get_num().get_si());
            irhs[1][j] = I128(gamma[j]) * 97 + I128(W.get_num().get_si());
        }
    }
    WalkState st{B_, initial_d_tuple(n), {}, {}};
    Rat t = 0;
    for (long long step = 0; step <= budget; ++step) {
        if (st.revisit()) return std::nullopt;
        I128 det;
        std::vector<std::vector<I128>> X;
        std::optional<Rat> best;
        size_t k = 0;
        if (int_ok && st.solve_int(irhs, det, X)) {
            // Signs and ratios only; a_i = X[0][i] / (97 det), b_i = X[1][i] / (97 det).
            if (det < 0) {
                det = -det;
                for (auto& row : X)
                    for (auto& x : row) x = -x;
            }
            bool inside = true;
            for (size_t i = 0; i < n; ++i)
                if (X[0][i] + X[1][i] < 0) inside = false;
            if (inside) {
                std::vector<Rat> c1(n);
                for (size_t i = 0; i < n; ++i) c1[i] = ratio(X[0][i] + X[1][i], det, 97);
                return accept(st, c1);
            }
            for (size_t i = 0; i < n; ++i) {
                if (X[1][i] >= 0) continue;
                Rat ti = ratio(-X[0][i], X[1][i]);
                if (ti >= t && (!best || ti < *best)) {
                    best = ti;
                    k = i;
                }
            }
        } else {
            auto a = st.solve(p0), b = st.solve(dir);
            std::vector<Rat> c1(n);
            bool inside = true;
            for (size_t i = 0; i < n; ++i) {
                c1[i] = a[i] + b[i];
                if (c1[i] < 0) inside = false;
            }
            if (inside) return accept(st, c1);
            for (size_t i = 0; i < n; ++i) {
                if (b[i] >= 0) continue;
                Rat ti = -a[i] / b[i];
                if (ti >= t && (!best || ti < *best)) {
                    best = ti;
                    k = i;
                }
            }
        }
        if (!best) return std::nullopt;
        t = *best;
        st.mutate(k);
    }
    return std::nullopt;
}

std::optional<RealExpansion> FanContext::greedy_walk(const RootVec& gamma, long long budget) const {
    const size_t n = sys_.dim();
    std::vector<Rat> g;
    std::vector<I128> ig;
    for (long long x : gamma) g.push_back(Rat(long(x))), ig.push_back(x);
    WalkState st{B_, initial_d_tuple(n), {}, {}};
    for (long long step = 0; step <= budget; ++step) {
        if (st.revisit()) return std::nullopt;
        std::vector<Rat> c(n);
        I128 det;
        std::vector<std::vector<I128>> X;
        if (st.solve_int({ig}, det, X))
            for (size_t i = 0; i < n; ++i) c[i] = ratio(X[0][i], det);
        else
            c = st.solve(g);
        auto neg = std::find_if(c.begin(), c.end(), [](const Rat& x) { return x < 0; });
        if (neg == c.end()) return accept(st, c);
        st.mutate(size_t(neg - c.begin()));
    }
    return std::nullopt;
}

std::optional<RealExpansion> FanContext::real_expansion(const RootVec& gamma) const {
    if (gamma.size() != sys_.dim()) throw DomainError("root vector has wrong dimension for " + sys_.tag.name());
    auto it = real_cache_.find(gamma);
    if (it != real_cache_.end()) return it->second;
    long long budget = budget_for(gamma);
    std::optional<RealExpansion> r = ray_walk(gamma, true, budget);
    if (!r) r = ray_walk(gamma, false, budget);
    if (!r) r = greedy_walk(gamma, budget);
    real_cache_.emplace(gamma, r);
    return r;
}

bool FanContext::real_compatible(const RootVec& a, const RootVec& b) const {
    if (a == b) return true;
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    auto it = compat_cache_.find(key);
    if (it != compat_cache_.end()) return it->second;
    RootVec s = add(a, b);
    bool verdict;
    if (auto r = real_expansion(s)) {
        std::map<RootVec, long long> want{{a, 1}, {b, 1}};
        verdict = r->coeffs == want;
    } else if (!imaginary_candidates(s).empty()) {
        verdict = false;
    } else {
        throw IndeterminateError("compatibility of " + format_rootvec(a) + " and " + format_rootvec(b) +
                                 " undecided within budget");
    }
    compat_cache_.emplace(key, verdict);
    return verdict;
}

bool FanContext::compatible(const PhiC& a, const PhiC& b) const {
    if (a.is_delta && b.is_delta) return true;
    if (a.is_delta) return in_lambda(b.root);
    if (b.is_delta) return in_lambda(a.root);
    return real_compatible(a.root, b.root);
}

std::vector<Expansion> FanContext::imaginary_candidates(const RootVec& gamma) const {
    std::vector<Expansion> out;
    long long kmax = *std::max_element(gamma.begin(), gamma.end());
    std::vector<RootVec> lam;
    for (auto& comp : lambda_) lam.insert(lam.end(), comp.begin(), comp.end());
    std::sort(lam.begin(), lam.end());
    for (long long k = 1; k <= kmax; ++k) {
        RootVec eta = add(gamma, sys_.delta, -k);
        if (!nonneg(eta)) continue;
        std::vector<std::pair<RootVec, long long>> chosen;
        std::function<void(size_t, const RootVec&)> dfs = [&](size_t idx, const RootVec& rem) {
            if (is_zero(rem)) {
                Expansion e;
                e.delta = k;
                for (auto& [r, m] : chosen) e.real[r] = m;
                out.push_back(e);
                return;
            }
            for (size_t i = idx; i < lam.size(); ++i) {
                const RootVec& r = lam[i];
                bool ok = true;
                for (auto& [c, m] : chosen)
                    if (!real_compatible(c, r)) {
                        ok = false;
                        break;
                    }
                if (!ok) continue;
                RootVec left = rem;
                long long m = 0;
                while (true) {
                    left = add(left, r, -1);
                    if (!nonneg(left)) break;
                    ++m;
                    chosen.push_back({r, m});
                    dfs(i + 1, left);
                    chosen.pop_back();
                }
            }
        };
        dfs(0, eta);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Expansion FanContext::cluster_expansion(const RootVec& gamma) const {
    if (gamma.size() != sys_.dim()) throw DomainError("root vector has wrong dimension for " + sys_.tag.name());
    Expansion e;
    if (is_zero(gamma)) return e;
    if (auto r = real_expansion(gamma)) {
        e.real = r->coeffs;
        return e;
    }
    auto sols = imaginary_candidates(gamma);
    if (sols.empty())
        throw IndeterminateError("no c-cluster expansion of " + format_rootvec(gamma) + " found within budget");
    if (sols.size() > 1)
        throw InvariantError("c-cluster expansion of " + format_rootvec(gamma) + " is not unique (" +
                             std::to_string(sols.size()) + " candidates)");
    return sols.front();
}

std::vector<RootVec> FanContext::candidates(int box) const {
    auto it = cand_cache_.find(box);
    if (it != cand_cache_.end()) return it->second;
    const size_t n = sys_.dim();
    std::vector<RootVec> out;
    for (size_t i = 0; i < n; ++i) out.push_back(unit(n, int(i), -1));
    std::set<RootVec> pos;
    for (RootVec b : finite_positive_roots(sys_.finite())) {
        for (int sign : {1, -1}) {
            RootVec beta = b;
            for (auto& x : beta) x *= sign;
            for (long long k = 0;; ++k) {
                RootVec v = add(beta, sys_.delta, k);
                if (*std::max_element(v.begin(), v.end()) > box) break;
                if (nonneg(v) && !is_zero(v) && in_phi_c_re(v)) pos.insert(v);
            }
        }
    }
    out.insert(out.end(), pos.begin(), pos.end());
    cand_cache_.emplace(box, out);
    return out;
}

std::vector<Expansion> FanContext::brute_force_oracle(const RootVec& gamma, int box) const {
    const size_t n = sys_.dim();
    std::vector<PhiC> cand;
    for (auto& r : candidates(box)) cand.push_back(PhiC::real(r));
    cand.push_back(PhiC::delta());
    const size_t N = cand.size();
    auto vec = [&](size_t i) -> const RootVec& { return cand[i].is_delta ? sys_.delta : cand[i].root; };
    // Pairwise compatibility of the whole candidate set, computed once per box.
    auto& comp = oracle_compat_[box];
    if (comp.size() != N) {
        comp.assign(N, std::vector<bool>(N, true));
        for (size_t i = 0; i < N; ++i)
            for (size_t j = i + 1; j < N; ++j) comp[i][j] = comp[j][i] = compatible(cand[i], cand[j]);
    }
    std::vector<Expansion> out;
    std::vector<std::pair<size_t, long long>> chosen;
    auto compat_all = [&](size_t c) {
        for (auto& [i, m] : chosen)
            if (!comp[i][c]) return false;
        return true;
    };
    // Every still-positive coordinate j < upto must be coverable by some candidate >= from.
    auto coverable = [&](const RootVec& rem, size_t from, size_t upto) {
        for (size_t j = 0; j < upto; ++j) {
            if (rem[j] < 0) return false;
            if (rem[j] == 0) continue;
            bool found = false;
            for (size_t c = std::max(from, n); c < N && !found; ++c)
                if (vec(c)[j] > 0 && compat_all(c)) found = true;
            if (!found) return false;
        }
        return true;
    };
    std::function<void(size_t, const RootVec&)> dfs = [&](size_t idx, const RootVec& rem) {
        if (idx < n) {
            // Negative simple roots: multiplicity m adds m to coordinate idx.
            long long hi = std::max(0LL, -gamma[idx]) + box;
            for (long long m = 0; m <= hi; ++m) {
                RootVec r = rem;
                r[idx] += m;
                if (m) chosen.push_back({idx, m});
                if (coverable(r, n, idx + 1)) dfs(idx + 1, r);
                if (m) chosen.pop_back();
            }
            return;
        }
        if (is_zero(rem)) {
            Expansion e;
            for (auto& [i, m] : chosen) {
                if (cand[i].is_delta) e.delta += m;
                else e.real[cand[i].root] += m;
            }
            out.push_back(e);
            return;
        }
        if (idx >= N || !coverable(rem, idx, n)) return;
        const RootVec& v = vec(idx);
        if (compat_all(idx)) {
            RootVec r = rem;
            long long m = 0;
            while (true) {
                r = add(r, v, -1);
                if (!nonneg(r)) break;
                ++m;
                chosen.push_back({idx, m});
                dfs(idx + 1, r);
                chosen.pop_back();
            }
        }
        dfs(idx + 1, rem);
    };
    dfs(0, gamma);
    std::sort(out.begin(), out.end());
    return out;
}

std::string expansion_json(const Expansion& e) {
    nlohmann::ordered_json j;
    j["delta"] = e.delta;
    j["real"] = nlohmann::ordered_json::array();
    for (auto& [r, m] : e.real) j["real"].push_back({{"root", format_rootvec(r)}, {"mult", m}});
    return j.dump();
}

}  // namespace catcluster
