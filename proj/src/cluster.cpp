#include "catcluster/cluster.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <sstream>

namespace catcluster {

std::vector<size_t> ExchangeMatrix::exchangeable() const {
    std::vector<size_t> r;
    for (size_t i = 0; i < size(); ++i)
        if (!frozen[i]) r.push_back(i);
    return r;
}

std::vector<size_t> ExchangeMatrix::frozen_nodes() const {
    std::vector<size_t> r;
    for (size_t i = 0; i < size(); ++i)
        if (frozen[i]) r.push_back(i);
    return r;
}

size_t ExchangeMatrix::index_of(const std::string& id) const {
    for (size_t i = 0; i < size(); ++i)
        if (ids[i] == id) return i;
    throw IndexError("unknown node '" + id + "'");
}

void ExchangeMatrix::validate() const {
    const size_t n = size();
    if (frozen.size() != n || b.size() != n) throw DomainError("exchange matrix shape mismatch");
    for (size_t i = 0; i < n; ++i) {
        if (b[i].size() != n) throw DomainError("exchange matrix shape mismatch");
        if (b[i][i] != 0) throw DomainError("nonzero diagonal entry at node " + ids[i]);
        for (size_t j = 0; j < n; ++j) {
            if (frozen[i] && frozen[j] && b[i][j] != 0)
                throw DomainError("frozen-frozen entry between " + ids[i] + " and " + ids[j]);
            if (b[i][j] != -b[j][i])
                throw DomainError("matrix is not skew-symmetric at (" + ids[i] + "," + ids[j] + ")");
        }
    }
}

ExchangeMatrix matrix_mutate(const ExchangeMatrix& B, size_t k) {
    if (k >= B.size()) throw IndexError("mutation index out of range");
    if (B.frozen[k]) throw IndexError("cannot mutate at frozen node " + B.ids[k]);
    ExchangeMatrix R = B;
    const size_t n = B.size();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            if (i == k || j == k) {
                R.b[i][j] = -B.b[i][j];
                continue;
            }
            if (B.frozen[i] && B.frozen[j]) {
                R.b[i][j] = 0;
                continue;
            }
            int bik = B.b[i][k], bkj = B.b[k][j];
            int v = B.b[i][j];
            if (bik > 0 && bkj > 0) v += bik * bkj;
            else if (bik < 0 && bkj < 0) v -= bik * bkj;
            R.b[i][j] = v;
        }
    return R;
}

ExchangeMatrix quiver_to_matrix(const Quiver& q) {
    ExchangeMatrix B;
    B.ids = q.ids;
    B.frozen = q.frozen;
    const size_t n = q.ids.size();
    B.b.assign(n, std::vector<int>(n, 0));
    std::vector<std::vector<int>> cnt(n, std::vector<int>(n, 0));
    for (const Arrow& a : q.arrows) {
        if (a.from >= n || a.to >= n) throw IndexError("arrow endpoint out of range");
        if (a.from == a.to) throw DomainError("loop at node " + q.ids[a.from]);
        if (a.mult <= 0) throw DomainError("arrow multiplicity must be positive");
        cnt[a.from][a.to] += a.mult;
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            if (cnt[i][j] && cnt[j][i]) throw DomainError("2-cycle between " + q.ids[i] + " and " + q.ids[j]);
            if (q.frozen[i] && q.frozen[j]) continue;
            B.b[i][j] = cnt[i][j] - cnt[j][i];
        }
    return B;
}

Quiver matrix_to_quiver(const ExchangeMatrix& B) {
    Quiver q{B.ids, B.frozen, {}};
    for (size_t i = 0; i < B.size(); ++i)
        for (size_t j = 0; j < B.size(); ++j)
            if (B.b[i][j] > 0) q.arrows.push_back({i, j, B.b[i][j]});
    return q;
}

bool principal_acyclic(const ExchangeMatrix& B) {
    auto ex = B.exchangeable();
    std::vector<int> indeg(B.size(), 0);
    for (size_t i : ex)
        for (size_t j : ex)
            if (B.b[i][j] > 0) ++indeg[j];
    std::vector<size_t> stack;
    for (size_t i : ex)
        if (!indeg[i]) stack.push_back(i);
    size_t seen = 0;
    while (!stack.empty()) {
        size_t u = stack.back();
        stack.pop_back();
        ++seen;
        for (size_t v : ex)
            if (B.b[u][v] > 0 && --indeg[v] == 0) stack.push_back(v);
    }
    return seen == ex.size();
}

Seed initial_seed(const ExchangeMatrix& B, std::optional<std::vector<Monomial>> labels) {
    Seed S;
    S.matrix = B;
    for (size_t v = 0; v < B.size(); ++v)
        S.vars.push_back(std::make_shared<const LaurentPoly>(LaurentPoly::variable(B.size(), v)));
    if (labels && labels->size() != B.size()) throw DomainError("label count does not match node count");
    S.labels = std::move(labels);
    return S;
}

LaurentPoly exchange_numerator(const Seed& S, size_t k) {
    const size_t n = S.matrix.size();
    if (S.vars.size() != n) throw DomainError("seed carries no Laurent data");
    LaurentPoly p = LaurentPoly::constant(n, 1), q = LaurentPoly::constant(n, 1);
    for (size_t j = 0; j < n; ++j) {
        int b = S.matrix.b[j][k];
        if (b > 0) p = p * S.vars[j]->pow(unsigned(b));
        else if (b < 0) q = q * S.vars[j]->pow(unsigned(-b));
    }
    return p + q;
}

Seed seed_mutate(const Seed& S, size_t k) {
    if (k >= S.matrix.size()) throw IndexError("mutation index out of range");
    if (S.matrix.frozen[k]) throw IndexError("cannot mutate at frozen node " + S.matrix.ids[k]);
    if (S.vars[k]->is_zero()) throw InvariantError("cluster variable is zero");
    Seed R;
    R.matrix = matrix_mutate(S.matrix, k);
    R.vars = S.vars;
    R.vars[k] = std::make_shared<const LaurentPoly>(exchange_numerator(S, k).divide_exact(*S.vars[k]));
    return R;
}

std::vector<int> d_vector_of(const LaurentPoly& y, const std::vector<size_t>& ex) {
    if (y.is_zero()) throw DomainError("d-vector of the zero polynomial");
    auto m = y.min_exponents();
    std::vector<int> d;
    for (size_t v : ex) d.push_back(-m[v]);
    return d;
}

DVectorTuple initial_d_tuple(size_t rank) {
    DVectorTuple D(rank, std::vector<int>(rank, 0));
    for (size_t i = 0; i < rank; ++i) D[i][i] = -1;
    return D;
}

DVectorTuple d_tuple_mutate(const DVectorTuple& D, const ExchangeMatrix& B, size_t kpos) {
    auto ex = B.exchangeable();
    if (kpos >= ex.size()) throw IndexError("mutation position out of range");
    if (D.size() != ex.size()) throw DomainError("d-tuple size does not match exchangeable count");
    const size_t k = ex[kpos];
    DVectorTuple R = D;
    for (size_t j = 0; j < ex.size(); ++j) {
        long pos = 0, neg = 0;
        for (size_t ip = 0; ip < ex.size(); ++ip) {
            int b = B.b[ex[ip]][k];
            if (b > 0) pos += long(b) * D[ip][j];
            else if (b < 0) neg += long(-b) * D[ip][j];
        }
        R[kpos][j] = int(-D[kpos][j] + std::max(pos, neg));
    }
    return R;
}

std::string AffineTag::name() const { return std::string(1, type) + std::to_string(n) + "_1"; }

std::vector<std::pair<int, int>> affine_edges(const AffineTag& t) {
    std::vector<std::pair<int, int>> e;
    if (t.type == 'D') {
        const int n = t.n;
        if (n < 4) throw DomainError("D_n^(1) needs n >= 4");
        e = {{1, 3}, {2, 3}};
        for (int i = 3; i < n - 1; ++i) e.push_back({i, i + 1});
        e.push_back({n, n - 1});
        e.push_back({0, n - 1});
    } else if (t.type == 'E') {
        if (t.n == 6) e = {{1, 2}, {2, 3}, {3, 5}, {5, 6}, {3, 4}, {4, 0}};
        else if (t.n == 7) e = {{0, 1}, {1, 2}, {2, 3}, {3, 5}, {5, 6}, {6, 7}, {3, 4}};
        else if (t.n == 8) e = {{1, 2}, {2, 3}, {3, 5}, {5, 6}, {6, 7}, {7, 8}, {8, 0}, {3, 4}};
        else throw DomainError("E_n^(1) needs n in {6,7,8}");
    } else {
        throw DomainError("unsupported affine type");
    }
    return e;
}

namespace {

// Labeled-graph isomorphism by backtracking with degree pruning.
std::optional<std::vector<int>> graph_iso(const std::vector<std::vector<bool>>& A,
                                          const std::vector<std::vector<bool>>& C) {
    const size_t n = A.size();
    if (C.size() != n) return std::nullopt;
    std::vector<int> dA(n), dC(n);
    for (size_t i = 0; i < n; ++i) {
        dA[i] = int(std::count(A[i].begin(), A[i].end(), true));
        dC[i] = int(std::count(C[i].begin(), C[i].end(), true));
    }
    std::vector<int> map(n, -1);
    std::vector<bool> used(n, false);
    std::function<bool(size_t)> bt = [&](size_t u) -> bool {
        if (u == n) return true;
        for (size_t c = 0; c < n; ++c) {
            if (used[c] || dA[u] != dC[c]) continue;
            bool ok = true;
            for (size_t w = 0; w < u && ok; ++w) ok = A[u][w] == C[c][size_t(map[w])];
            if (!ok) continue;
            map[u] = int(c);
            used[c] = true;
            if (bt(u + 1)) return true;
            used[c] = false;
        }
        map[u] = -1;
        return false;
    };
    if (!bt(0)) return std::nullopt;
    return map;
}

}  // namespace

std::optional<AffineDetection> detect_affine_type(const ExchangeMatrix& B) {
    auto ex = B.exchangeable();
    const size_t N = ex.size();
    std::vector<std::vector<bool>> A(N, std::vector<bool>(N, false));
    size_t edges = 0;
    for (size_t i = 0; i < N; ++i)
        for (size_t j = 0; j < N; ++j) {
            int b = B.b[ex[i]][ex[j]];
            if (b == 0) continue;
            if (b != 1 && b != -1) return std::nullopt;
            A[i][j] = true;
            if (i < j) ++edges;
        }
    if (N < 5 || edges != N - 1 || !principal_acyclic(B)) return std::nullopt;
    std::vector<AffineTag> cands{{'D', int(N) - 1}};
    if (N == 7) cands.push_back({'E', 6});
    if (N == 8) cands.push_back({'E', 7});
    if (N == 9) cands.push_back({'E', 8});
    for (const AffineTag& t : cands) {
        std::vector<std::vector<bool>> C(N, std::vector<bool>(N, false));
        for (auto [a, b] : affine_edges(t)) C[size_t(a)][size_t(b)] = C[size_t(b)][size_t(a)] = true;
        if (auto m = graph_iso(A, C)) return AffineDetection{t, *m};
    }
    return std::nullopt;
}

SeedFile parse_seed_text(const std::string& text) {
    Quiver q;
    std::vector<std::optional<Monomial>> labels;
    std::vector<std::tuple<std::string, std::string, int, int>> arrows;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& why) {
        throw DomainError("seed text line " + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        if (tok[0] == "node") {
            if (tok.size() < 2) fail("node without id");
            for (auto& id : q.ids)
                if (id == tok[1]) fail("duplicate node '" + tok[1] + "'");
            q.ids.push_back(tok[1]);
            q.frozen.push_back(false);
            labels.emplace_back();
            for (size_t t = 2; t < tok.size(); ++t) {
                if (tok[t] == "frozen") {
                    q.frozen.back() = true;
                } else if (tok[t].rfind("label=", 0) == 0) {
                    std::string body = tok[t].substr(6);
                    if (body.size() >= 2 && body.front() == '"') {
                        body.erase(0, 1);
                        while (body.back() != '"' && t + 1 < tok.size()) body += " " + tok[++t];
                        if (body.back() != '"') fail("unterminated label");
                        body.pop_back();
                    }
                    labels.back() = body == "1" ? Monomial() : parse_monomial(body);
                } else {
                    fail("unexpected token '" + tok[t] + "'");
                }
            }
        } else if (tok.size() >= 3 && tok[1] == "->") {
            int mult = 1;
            if (tok.size() == 4) {
                if (tok[3].size() < 2 || tok[3][0] != 'x') fail("bad multiplicity '" + tok[3] + "'");
                try {
                    mult = std::stoi(tok[3].substr(1));
                } catch (...) {
                    fail("bad multiplicity '" + tok[3] + "'");
                }
            } else if (tok.size() != 3) {
                fail("trailing tokens after arrow");
            }
            arrows.emplace_back(tok[0], tok[2], mult, lineno);
        } else {
            fail("unrecognised line");
        }
    }
    for (auto& [a, b, m, ln] : arrows) {
        lineno = ln;
        auto find = [&](const std::string& id) {
            for (size_t i = 0; i < q.ids.size(); ++i)
                if (q.ids[i] == id) return i;
            fail("arrow mentions undeclared node '" + id + "'");
            return size_t(0);
        };
        q.arrows.push_back({find(a), find(b), m});
    }
    SeedFile sf;
    sf.matrix = quiver_to_matrix(q);
    bool any = std::any_of(labels.begin(), labels.end(), [](auto& l) { return l.has_value(); });
    if (any) {
        if (!std::all_of(labels.begin(), labels.end(), [](auto& l) { return l.has_value(); }))
            throw DomainError("seed text: labels must be given on every node or on none");
        std::vector<Monomial> ls;
        for (auto& l : labels) ls.push_back(*l);
        sf.labels = ls;
    }
    return sf;
}

std::string serialize_seed(const ExchangeMatrix& B, const std::optional<std::vector<Monomial>>& labels) {
    std::ostringstream os;
    for (size_t i = 0; i < B.size(); ++i) {
        os << "node " << B.ids[i];
        if (B.frozen[i]) os << " frozen";
        if (labels) os << " label=" << format_monomial_token((*labels)[i]);
        os << "\n";
    }
    for (size_t i = 0; i < B.size(); ++i)
        for (size_t j = 0; j < B.size(); ++j)
            if (B.b[i][j] > 0) {
                os << B.ids[i] << " -> " << B.ids[j];
                if (B.b[i][j] > 1) os << " x" << B.b[i][j];
                os << "\n";
            }
    return os.str();
}

ClusterVarTable::ClusterVarTable(size_t nvars, uint64_t rng_seed) : n_(nvars) {
    std::mt19937_64 rng(rng_seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_int_distribution<uint64_t> dist(2, modp::P - 1);
    for (int r = 0; r < 2; ++r) {
        std::vector<uint64_t> p(n_), q(n_);
        for (size_t v = 0; v < n_; ++v) {
            p[v] = dist(rng);
            q[v] = modp::inv(p[v]);
        }
        pts_.push_back(p);
        inv_.push_back(q);
    }
    for (size_t v = 0; v < n_; ++v) add(LaurentPoly::variable(n_, v));
}

size_t ClusterVarTable::add(LaurentPoly p) {
    std::array<uint64_t, 2> f{p.eval_mod(pts_[0], inv_[0]), p.eval_mod(pts_[1], inv_[1])};
    auto it = index_.find(f);
    if (it != index_.end()) return it->second;
    polys_.push_back(std::make_shared<const LaurentPoly>(std::move(p)));
    fp_.push_back(f);
    index_.emplace(f, polys_.size() - 1);
    return polys_.size() - 1;
}

size_t ClusterVarTable::mutate(const ExchangeMatrix& B, const std::vector<size_t>& ids, size_t k) {
    std::array<uint64_t, 2> f;
    for (int r = 0; r < 2; ++r) {
        uint64_t p = 1, q = 1;
        for (size_t j = 0; j < B.size(); ++j) {
            int b = B.b[j][k];
            if (b > 0) p = modp::mul(p, modp::pow(fp_[ids[j]][size_t(r)], uint64_t(b)));
            else if (b < 0) q = modp::mul(q, modp::pow(fp_[ids[j]][size_t(r)], uint64_t(-b)));
        }
        f[size_t(r)] = modp::mul(modp::add(p, q), modp::inv(fp_[ids[k]][size_t(r)]));
    }
    auto it = index_.find(f);
    if (it != index_.end()) return it->second;
    Seed S;
    S.matrix = B;
    for (size_t j = 0; j < B.size(); ++j) S.vars.push_back(polys_[ids[j]]);
    LaurentPoly y = exchange_numerator(S, k).divide_exact(*polys_[ids[k]]);
    ++divisions_;
    std::array<uint64_t, 2> g{y.eval_mod(pts_[0], inv_[0]), y.eval_mod(pts_[1], inv_[1])};
    if (g != f) throw InvariantError("fingerprint of exact exchange result disagrees with prediction");
    return add(std::move(y));
}

}  // namespace catcluster
