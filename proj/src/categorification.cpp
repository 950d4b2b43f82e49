#include "catcluster/categorification.hpp"

#include <algorithm>
#include <climits>
#include <map>

namespace catcluster {

namespace {

std::set<std::pair<int, int>> adjacency(const FiniteType& t) {
    std::set<std::pair<int, int>> a;
    for (auto [i, j] : finite_edges(t)) {
        a.insert({i, j});
        a.insert({j, i});
    }
    return a;
}

Monomial from_letters(std::initializer_list<Letter> ls) {
    Monomial m;
    for (auto& l : ls) m.add(l, 1);
    return m;
}

}  // namespace

// ---------------------------------------------------------------- sequences

int star_involution(const FiniteType& t, int i) {
    if (t.type == 'A') return t.n + 1 - i;
    if (t.type == 'D' && t.n % 2 == 1 && (i == 1 || i == 2)) return 3 - i;
    if (t.type == 'E' && t.n == 6) {
        static const int s[] = {0, 6, 5, 3, 4, 2, 1};
        return s[i];
    }
    return i;
}

Sequence extend_sequence(const FiniteType& t, const Sequence& window, size_t length) {
    if (window.empty()) throw DomainError("empty sequence window");
    const int h = coxeter_number(t);
    const size_t l = window.size();
    Sequence s = window;
    while (s.size() < length) {
        auto [i, p] = s[s.size() - l];
        s.push_back({star_involution(t, i), p + h});
    }
    return s;
}

AdmissibleReport admissible_validate(const FiniteType& t, const Sequence& s) {
    auto adj = adjacency(t);
    const size_t N = s.size();
    for (size_t a = 0; a < N; ++a) {
        if (s[a].first < 1 || s[a].first > t.n)
            return {false, a + 1, 0, "node " + std::to_string(s[a].first) + " is not in the diagram"};
        size_t nxt = a + 1;
        while (nxt < N && s[nxt].first != s[a].first) ++nxt;
        if (nxt == N) continue;
        if (s[nxt].second != s[a].second + 2)
            return {false, a + 1, 1,
                    "p at the next occurrence of node " + std::to_string(s[a].first) + " is not p+2"};
        for (size_t b = a + 1; b < nxt; ++b) {
            if (!adj.count({s[a].first, s[b].first})) continue;
            // b^- < a: no occurrence of iota_b in [a, b)
            bool earlier = false;
            for (size_t c = a; c < b && !earlier; ++c) earlier = s[c].first == s[b].first;
            if (!earlier && s[b].second != s[a].second + 1)
                return {false, a + 1, 2,
                        "adjacent node at position " + std::to_string(b + 1) + " does not have p+1"};
        }
    }
    const size_t l = size_t(longest_length(t));
    for (size_t k = 0; k + l <= N; ++k) {
        std::vector<int> w;
        for (size_t j = k; j < k + l; ++j) w.push_back(s[j].first);
        if (!word_product_is_w0(t, w))
            return {false, k + 1, 3, "window starting here does not multiply to w0"};
    }
    return {};
}

bool is_height_function(const FiniteType& t, const QDatum& q) {
    if (q.xi.size() != size_t(t.n) + 1) return false;
    for (auto [i, j] : finite_edges(t))
        if (std::abs(q.xi[size_t(i)] - q.xi[size_t(j)]) != 1) return false;
    return true;
}

bool is_sink(const FiniteType& t, const QDatum& q, int i) {
    for (auto [a, b] : finite_edges(t)) {
        if (a == i && !(q.xi[size_t(i)] < q.xi[size_t(b)])) return false;
        if (b == i && !(q.xi[size_t(i)] < q.xi[size_t(a)])) return false;
    }
    return true;
}

RhoResult rho(const FiniteType& t, const Sequence& seq) {
    const size_t l = size_t(longest_length(t));
    if (seq.size() < l) throw DomainError("sequence shorter than the length of w0");
    RhoResult r;
    r.q.xi.assign(size_t(t.n) + 1, INT_MIN);
    for (size_t k = 0; k < l; ++k) {
        auto [i, p] = seq[k];
        r.word.push_back(i);
        if (r.q.xi[size_t(i)] == INT_MIN) r.q.xi[size_t(i)] = p;
    }
    r.q.xi[0] = 0;
    for (int i = 1; i <= t.n; ++i)
        if (r.q.xi[size_t(i)] == INT_MIN) throw DomainError("node " + std::to_string(i) + " missing from window");
    return r;
}

Sequence rho_inverse(const FiniteType& t, const QDatum& q, const std::vector<int>& word) {
    if (!is_height_function(t, q)) throw DomainError("xi is not a height function");
    QDatum cur = q;
    Sequence s;
    for (size_t k = 0; k < word.size(); ++k) {
        int i = word[k];
        if (i < 1 || i > t.n) throw DomainError("letter out of range in word");
        if (k + 1 < word.size() && !is_sink(t, cur, i))
            throw DomainError("word is not adapted: letter " + std::to_string(i) + " at position " +
                              std::to_string(k + 1) + " is not a sink");
        s.push_back({i, cur.xi[size_t(i)]});
        cur.xi[size_t(i)] += 2;
    }
    return s;
}

// ---------------------------------------------------------------- GLS / KKOP

size_t seq_plus(const Sequence& s, size_t k) {
    for (size_t j = k + 1; j <= s.size(); ++j)
        if (s[j - 1].first == s[k - 1].first) return j;
    return 0;
}

size_t seq_minus(const Sequence& s, size_t k) {
    for (size_t j = k - 1; j >= 1; --j)
        if (s[j - 1].first == s[k - 1].first) return j;
    return 0;
}

namespace {

void check_interval(const Sequence& s, size_t a, size_t b) {
    if (a < 1 || a > b || b > s.size()) throw DomainError("interval outside the sequence");
}

}  // namespace

Quiver gls_quiver(const FiniteType& t, const Sequence& s, size_t a, size_t b) {
    check_interval(s, a, b);
    auto adj = adjacency(t);
    Quiver q;
    for (size_t k = a; k <= b; ++k) {
        q.ids.push_back(std::to_string(k));
        size_t m = seq_minus(s, k);
        q.frozen.push_back(m == 0 || m < a);
    }
    std::map<std::pair<size_t, size_t>, int> cnt;
    for (size_t u = a; u <= b; ++u) {
        size_t m = seq_minus(s, u);
        if (m != 0 && m >= a) cnt[{u, m}] += 1;
        size_t up = seq_plus(s, u);
        if (up == 0) throw DomainError("sequence too short to locate successors inside the interval");
        for (size_t v = u + 1; v < std::min(up, b + 1); ++v) {
            size_t vm = seq_minus(s, v);
            if (adj.count({s[u - 1].first, s[v - 1].first}) && (vm == 0 || vm < u)) cnt[{u, v}] += 1;
        }
    }
    for (auto& [e, c] : cnt) {
        size_t i = e.first - a, j = e.second - a;
        if (q.frozen[i] && q.frozen[j]) continue;
        q.arrows.push_back({i, j, c});
    }
    return q;
}

Seed kkop_initial_seed(const FiniteType& t, const Sequence& s, size_t a, size_t b) {
    Quiver q = gls_quiver(t, s, a, b);
    std::vector<Monomial> labels;
    for (size_t k = a; k <= b; ++k) {
        Monomial m;
        for (size_t j = k; j != 0 && j <= b; j = seq_plus(s, j)) m.add(s[j - 1], 1);
        labels.push_back(m);
    }
    return initial_seed(quiver_to_matrix(q), labels);
}

// ---------------------------------------------------------------- families

std::string FamilyKey::tag() const {
    switch (kind) {
        case FamilyKind::Dn_s1: return "Dn_s1";
        case FamilyKind::D4_s2: return "D4_s2";
        case FamilyKind::En_s1: return "En_s1";
        case FamilyKind::An_s1: return "An_s1";
    }
    return "?";
}

std::string FamilyKey::name() const {
    switch (kind) {
        case FamilyKind::Dn_s1: return "D" + std::to_string(n) + "_s1";
        case FamilyKind::D4_s2: return "D4_s2";
        case FamilyKind::En_s1: return "E" + std::to_string(n) + "_s1";
        case FamilyKind::An_s1: return "A" + std::to_string(n) + "_s1";
    }
    return "?";
}

FamilyKey parse_family(const std::string& tag, int n) {
    FamilyKey k;
    k.n = n;
    if (tag == "Dn_s1") {
        k.kind = FamilyKind::Dn_s1;
        if (n < 4) throw DomainError("Dn_s1 needs n >= 4");
    } else if (tag == "D4_s2") {
        k.kind = FamilyKind::D4_s2;
        k.n = 4;
        if (n != 4) throw DomainError("D4_s2 is defined for n = 4 only");
    } else if (tag == "En_s1") {
        k.kind = FamilyKind::En_s1;
        if (n < 6 || n > 8) throw DomainError("En_s1 needs n in {6,7,8}");
    } else if (tag == "An_s1") {
        k.kind = FamilyKind::An_s1;
        if (n < 2) throw DomainError("An_s1 needs n >= 2");
    } else {
        throw DomainError("unknown family '" + tag + "' (expected Dn_s1, D4_s2, En_s1 or An_s1)");
    }
    return k;
}

std::vector<FamilyKey> theorem_table_keys() {
    using K = FamilyKind;
    return {{K::Dn_s1, 4}, {K::Dn_s1, 5}, {K::Dn_s1, 6}, {K::D4_s2, 4}, {K::En_s1, 6}, {K::En_s1, 7},
            {K::En_s1, 8}, {K::An_s1, 2}, {K::An_s1, 3}, {K::An_s1, 4}, {K::An_s1, 5}, {K::An_s1, 6}};
}

std::vector<int> FamilyConfig::neighbors(int v) const {
    std::set<int> s;
    for (auto [a, b] : edges) {
        if (a == v) s.insert(b);
        if (b == v) s.insert(a);
    }
    return {s.begin(), s.end()};
}

std::vector<std::pair<int, Monomial>> FamilyConfig::frozen_monomials() const {
    std::vector<std::pair<int, Monomial>> out;
    for (auto& p : plain) out.push_back({p.neg.first, from_letters({p.neg, p.pos})});
    for (auto& b : blocks) out.push_back({b.node, from_letters({b.v0, b.v1, b.v2})});
    std::sort(out.begin(), out.end(), [](auto& x, auto& y) { return x.first < y.first; });
    return out;
}

namespace {

Sequence family_window(const FamilyKey& key) {
    Sequence s;
    const int n = key.n;
    switch (key.kind) {
        case FamilyKind::Dn_s1:
            if (n % 2 == 0) {
                const int m = n / 2;
                for (int p = 0; p < 2 * m - 1; ++p)
                    for (int k = 0; k < 2 * m; ++k) {
                        if (k <= m - 2) s.push_back({2 * m - 1 - 2 * k, 2 * p});
                        else if (k <= 2 * m - 2) s.push_back({4 * m - 2 - 2 * k, 2 * p + 1});
                        else s.push_back({1, 2 * p + 1});
                    }
            } else {
                const int m = (n + 1) / 2;
                for (int p = 0; p < 2 * m - 2; ++p)
                    for (int k = 0; k < 2 * m - 1; ++k) {
                        if (k <= m - 2) s.push_back({2 * m - 2 - 2 * k, 2 * p});
                        else if (k == m - 1) s.push_back({1, 2 * p});
                        else s.push_back({4 * m - 1 - 2 * k, 2 * p + 1});
                    }
            }
            break;
        case FamilyKind::D4_s2: {
            const int io[] = {1, 2, 4, 3};
            for (int p = 0; p < 3; ++p)
                for (int k = 0; k < 4; ++k) s.push_back({io[k], k < 3 ? 2 * p + 1 : 2 * p + 2});
            break;
        }
        case FamilyKind::En_s1: {
            std::vector<int> io = n == 6 ? std::vector<int>{4, 2, 5, 1, 3, 6}
                                 : n == 7 ? std::vector<int>{1, 3, 6, 2, 4, 5, 7}
                                          : std::vector<int>{8, 1, 3, 6, 2, 4, 5, 7};
            const int h = coxeter_number({'E', n});
            for (int p = 0; p < h / 2; ++p)
                for (int k = 0; k < n; ++k) s.push_back({io[size_t(k)], k <= n / 2 - 1 ? 2 * p : 2 * p + 1});
            break;
        }
        case FamilyKind::An_s1:
            if (n == 2) {
                s = {{2, 0}, {1, 1}, {2, 2}};
            } else if (n == 3) {
                s = {{2, 0}, {1, 1}, {3, 1}, {2, 2}, {1, 3}, {3, 3}};
            } else if (n == 4) {
                s = {{1, 0}, {2, 1}, {3, 2}, {1, 2}, {4, 3}, {2, 3}, {3, 4}, {1, 4}, {2, 5}, {1, 6}};
            } else if (n % 2 == 1) {
                const int m = (n + 1) / 2;
                for (int p = 0; p < m; ++p)
                    for (int k = 0; k < 2 * m - 1; ++k) {
                        if (k == 0) s.push_back({2 * m - 2, 2 * p + 1});
                        else if (k <= m - 2) s.push_back({2 * k, 2 * p + 1});
                        else s.push_back({2 * k - 2 * m + 3, 2 * p + 2});
                    }
            } else {
                const int m = n / 2;
                for (int p = 0; p <= m; ++p)
                    for (int k = 0; k < 2 * m; ++k) {
                        if (1 + k + 2 * m * p > m * (2 * m + 1)) break;
                        if (k == 0) s.push_back({2, 2 * p});
                        else if (p < m && k <= m) s.push_back({2 * m + 1 - 2 * k, 2 * p + 1});
                        else if (p < m) s.push_back({4 * m + 2 - 2 * k, 2 * p + 2});
                        else s.push_back({2 * k - 1, 2 * p + 1});
                    }
            }
            break;
    }
    return s;
}

}  // namespace

FamilyConfig make_family(const FamilyKey& key) {
    FamilyConfig c;
    c.key = key;
    const int n = key.n;
    c.a = 1;
    c.has_g = true;
    auto add_plain = [&](int i, Letter neg, Letter pos) { c.plain.push_back({i, neg, pos}); };
    switch (key.kind) {
        case FamilyKind::Dn_s1: {
            c.fin = {'D', n};
            c.b = size_t(2 * n + 1);
            c.target = {'D', n};
            std::vector<int> I0, I1;
            if (n % 2 == 0) {
                I0 = {1, 2};
                for (int i = 4; i <= n; i += 2) I0.push_back(i);
                for (int i = 3; i < n; i += 2) I1.push_back(i);
            } else {
                for (int i = 3; i <= n; i += 2) I0.push_back(i);
                I1 = {1, 2};
                for (int i = 4; i < n; i += 2) I1.push_back(i);
            }
            for (int i : I0) add_plain(i, {i, 1}, {i, 3});
            for (int j : I1)
                if (j != n - 1) add_plain(j, {j, 2}, {j, 0});
            c.blocks.push_back({n - 1, {n - 1, 0}, {n - 1, 2}, {n - 1, 4}, 0, n - 1});
            c.edges = affine_edges(c.target);
            break;
        }
        case FamilyKind::D4_s2:
            c.fin = {'D', 4};
            c.b = 11;
            c.target = {'E', 6};
            c.label_shift = -1;
            add_plain(3, {3, 1}, {3, 3});
            c.blocks.push_back({1, {1, 0}, {1, 2}, {1, 4}, 1, 2});
            c.blocks.push_back({2, {2, 0}, {2, 2}, {2, 4}, 0, 4});
            c.blocks.push_back({4, {4, 0}, {4, 2}, {4, 4}, 6, 5});
            c.edges = affine_edges(c.target);
            break;
        case FamilyKind::En_s1: {
            c.fin = {'E', n};
            c.b = size_t(2 * n + 1);
            c.target = {'E', n};
            std::vector<int> I0, I1;
            int k;
            if (n == 6) I0 = {1, 3, 6}, I1 = {2, 4, 5}, k = 4;
            else if (n == 7) I0 = {2, 4, 5, 7}, I1 = {1, 3, 6}, k = 1;
            else I0 = {2, 4, 5, 7}, I1 = {1, 3, 6, 8}, k = 8;
            for (int i : I0) add_plain(i, {i, 1}, {i, 3});
            for (int j : I1)
                if (j != k) add_plain(j, {j, 2}, {j, 0});
            c.blocks.push_back({k, {k, 0}, {k, 2}, {k, 4}, 0, k});
            c.edges = affine_edges(c.target);
            break;
        }
        case FamilyKind::An_s1: {
            c.fin = {'A', n};
            if (n == 2) c.b = 11, c.target = {'E', 8};
            else if (n == 3) c.b = 10, c.target = {'E', 6};
            else if (n == 4) c.b = 13, c.target = {'E', 8};
            else c.b = size_t(2 * n + 2), c.target = {'D', n + 1};
            if (n < 5) {
                c.has_g = false;
                break;
            }
            std::vector<int> I0, I1;
            for (int i = 1; i <= n; ++i) ((i % 2 == 0) == (n % 2 == 1) ? I0 : I1).push_back(i);
            for (int i : I0)
                if (i != 2 && i != n - 1) add_plain(i, {i, 3}, {i, 1});
            for (int j : I1)
                if (j != 2 && j != n - 1) add_plain(j, {j, 2}, {j, 4});
            if (n % 2 == 1) c.blocks.push_back({2, {2, 1}, {2, 3}, {2, 5}, 0, 2});
            else c.blocks.push_back({2, {2, 4}, {2, 2}, {2, 0}, 0, 2});
            c.blocks.push_back({n - 1, {n - 1, 1}, {n - 1, 3}, {n - 1, 5}, n + 1, n - 1});
            std::set<std::pair<int, int>> e{{0, 2}, {1, 2}, {n, n - 1}, {n + 1, n - 1}};
            for (int i = 2; i < n - 1; ++i) e.insert({i, i + 1});
            c.edges.assign(e.begin(), e.end());
            break;
        }
    }
    c.window = family_window(key);
    c.sequence = extend_sequence(c.fin, c.window, 3 * c.window.size() + 4 * c.b);
    const size_t dim = size_t(c.target.n) + 1;
    c.to_standard.resize(dim);
    for (size_t i = 0; i < dim; ++i) c.to_standard[i] = int(i);
    if (key.kind == FamilyKind::An_s1 && n >= 5) {
        // Family labels put the forks at 2 and n-1; the standard D_{n+1} labels put them at 3 and n.
        c.to_standard[0] = 1;
        c.to_standard[1] = 2;
        for (int f = 2; f <= n - 1; ++f) c.to_standard[size_t(f)] = f + 1;
        c.to_standard[size_t(n)] = n + 1;
        c.to_standard[size_t(n + 1)] = 0;
    }
    for (auto& p : c.plain) c.alphabet.insert({p.neg, p.pos});
    for (auto& b : c.blocks) c.alphabet.insert({b.v0, b.v1, b.v2});
    return c;
}

std::vector<Monomial> theorem_mutation_labels(const FamilyKey& key) {
    auto L = [](std::initializer_list<Letter> ls) { return from_letters(ls); };
    const int n = key.n;
    std::vector<Monomial> o;
    switch (key.kind) {
        case FamilyKind::Dn_s1:
            if (n % 2 == 0) {
                const int m = n / 2;
                o = {L({{2 * m - 1, 4}}), L({{2 * m, 3}})};
                for (int i = 2 * m - 2; i > 3; i -= 2) o.push_back(L({{i, 3}}));
                o.push_back(L({{2, 3}}));
                o.push_back(L({{1, 3}}));
            } else {
                const int m = (n + 1) / 2;
                o = {L({{2 * m - 2, 4}}), L({{2 * m - 1, 3}})};
                for (int i = 2 * m - 3; i > 2; i -= 2) o.push_back(L({{i, 3}}));
            }
            break;
        case FamilyKind::D4_s2:
            o = {L({{1, 5}}), L({{2, 5}}), L({{4, 5}}), L({{3, 4}})};
            break;
        case FamilyKind::En_s1:
            if (n == 6) o = {L({{4, 4}}), L({{3, 3}}), L({{1, 3}}), L({{6, 3}})};
            else if (n == 7) o = {L({{1, 4}}), L({{2, 3}}), L({{4, 3}}), L({{5, 3}}), L({{7, 3}})};
            else o = {L({{8, 4}}), L({{7, 3}}), L({{2, 3}}), L({{4, 3}}), L({{5, 3}})};
            break;
        case FamilyKind::An_s1:
            if (n == 2) {
                Monomial a = L({{2, 8}, {2, 10}});
                o = {a,
                     L({{2, 6}, {2, 8}, {2, 10}}),
                     L({{2, 4}, {2, 6}, {2, 8}, {2, 10}}),
                     L({{2, 2}, {2, 4}, {2, 6}, {2, 8}, {2, 10}}),
                     L({{1, 3}, {1, 5}, {1, 7}, {1, 9}}),
                     L({{1, 5}, {1, 7}, {1, 9}}),
                     a,
                     L({{1, 9}})};
            } else if (n == 3) {
                o = {L({{2, 4}, {2, 6}}), L({{1, 5}}), L({{2, 6}}), L({{3, 5}})};
            } else if (n == 4) {
                o = {L({{2, 5}, {2, 7}}), L({{2, 3}, {2, 5}, {2, 7}}), L({{1, 2}, {1, 4}, {1, 6}}),
                     L({{1, 4}, {1, 6}}), L({{3, 6}}),   L({{4, 5}}),
                     L({{3, 4}, {3, 6}}), L({{1, 6}})};
            } else if (n % 2 == 1) {
                const int m = (n + 1) / 2;
                o = {L({{2, 5}})};
                for (int i = 1; i < 2 * m - 4; i += 2) o.push_back(L({{i, 4}}));
                o.push_back(L({{2 * m - 2, 5}}));
                o.push_back(L({{2 * m - 3, 4}}));
                o.push_back(L({{2 * m - 1, 4}}));
            } else {
                const int m = n / 2;
                o = {L({{2, 4}}), L({{2, 2}, {2, 4}})};
                for (int i = 4; i < 2 * m - 3; i += 2) o.push_back(L({{i, 4}}));
                o.push_back(L({{2 * m - 1, 5}}));
                o.push_back(L({{2 * m - 2, 4}}));
                o.push_back(L({{2 * m, 4}}));
            }
            break;
    }
    return o;
}

std::vector<size_t> theorem_mutation_positions(const FamilyConfig& cfg, const Seed& kkop) {
    std::vector<size_t> pos;
    for (const Monomial& m : theorem_mutation_labels(cfg.key)) {
        std::vector<size_t> hits;
        for (size_t i = 0; i < kkop.matrix.size(); ++i)
            if (!kkop.matrix.frozen[i] && (*kkop.labels)[i] == m) hits.push_back(i);
        if (hits.size() != 1)
            throw InvariantError("mutation label " + format_monomial(m) + " does not name a unique exchangeable node");
        pos.push_back(hits[0] + cfg.a);
    }
    return pos;
}

LabelCandidates label_candidates(const ExchangeMatrix& B, const std::vector<Monomial>& labels, size_t k) {
    Monomial P, N;
    for (size_t i = 0; i < B.size(); ++i) {
        int b = B.b[i][k];
        if (b > 0) P = P * labels[i].pow(b);
        else if (b < 0) N = N * labels[i].pow(-b);
    }
    LabelCandidates c;
    if (auto u = P.divide(labels[k])) c.up = *u, c.up_ok = true;
    if (auto d = N.divide(labels[k])) c.down = *d, c.down_ok = true;
    return c;
}

Seed monomial_seed_mutate(const Seed& S, size_t k, const LabelChooser& choose) {
    if (!S.labels) throw DomainError("seed carries no monomial labels");
    if (k >= S.matrix.size() || S.matrix.frozen[k]) throw IndexError("cannot mutate at this node");
    auto c = label_candidates(S.matrix, *S.labels, k);
    Monomial chosen;
    if (c.up_ok && !c.down_ok) chosen = c.up;
    else if (c.down_ok && !c.up_ok) chosen = c.down;
    else if (!c.up_ok && !c.down_ok)
        throw InvariantError("neither exchange candidate at node " + S.matrix.ids[k] + " is a genuine monomial");
    else if (c.up == c.down) chosen = c.up;
    else {
        std::optional<Monomial> pick = choose ? choose(c) : std::nullopt;
        if (!pick)
            throw InvariantError("both exchange candidates at node " + S.matrix.ids[k] +
                                 " are genuine and no disambiguation was possible");
        chosen = *pick;
    }
    Seed R;
    R.matrix = matrix_mutate(S.matrix, k);
    if (!S.vars.empty()) {
        R.vars = S.vars;
        R.vars[k] = std::make_shared<const LaurentPoly>(exchange_numerator(S, k).divide_exact(*S.vars[k]));
    }
    R.labels = S.labels;
    (*R.labels)[k] = chosen;
    return R;
}

TheoremResult theorem_mutation_sequence(const FamilyKey& key) {
    FamilyConfig cfg = make_family(key);
    Seed kk = kkop_initial_seed(cfg.fin, cfg.sequence, cfg.a, cfg.b);
    TheoremResult r;
    r.positions = theorem_mutation_positions(cfg, kk);
    ExchangeMatrix B = kk.matrix;
    for (auto& l : *kk.labels) r.labels.push_back(l);
    for (size_t pos : r.positions) {
        size_t k = pos - cfg.a;
        bool known = r.labels[k].has_value();
        for (size_t i = 0; i < B.size() && known; ++i)
            if (B.b[i][k] != 0 && !r.labels[i]) known = false;
        std::optional<Monomial> next;
        if (known) {
            std::vector<Monomial> cur;
            for (auto& l : r.labels) cur.push_back(l ? *l : Monomial());
            auto c = label_candidates(B, cur, k);
            if (c.up_ok != c.down_ok) next = c.up_ok ? c.up : c.down;
            else if (c.up_ok && c.up == c.down) next = c.up;
        }
        if (!next && cfg.has_g)
            throw InvariantError("label at node " + std::to_string(pos) + " of " + key.name() +
                                 " is not determined by the exchange monomials");
        r.labels[k] = next;
        B = matrix_mutate(B, k);
    }
    r.detected = detect_affine_type(B);
    if (!r.detected || !(r.detected->tag == cfg.target))
        throw InvariantError(key.name() + ": mutated principal quiver is " +
                             (r.detected ? r.detected->tag.name() : std::string("not affine")) + ", expected " +
                             cfg.target.name());
    std::optional<std::vector<Monomial>> labels;
    if (std::all_of(r.labels.begin(), r.labels.end(), [](auto& l) { return l.has_value(); })) {
        labels.emplace();
        for (auto& l : r.labels) labels->push_back(*l);
    }
    r.seed = initial_seed(B, labels);
    return r;
}

// ---------------------------------------------------------------- canonical form and G

void check_alphabet(const Monomial& m, const FamilyConfig& cfg) {
    if (!cfg.has_g) throw DomainError("family " + cfg.key.name() + " has no monomial model for classification");
    for (auto& [l, k] : m.factors())
        if (!cfg.alphabet.count(l))
            throw DomainError("letter " + std::to_string(l.first) + "_" + std::to_string(l.second) +
                              " is outside the alphabet of " + cfg.key.name());
}

bool CanonicalForm::constraints_hold() const {
    auto one = [](std::initializer_list<long long> v) {
        return std::count_if(v.begin(), v.end(), [](long long x) { return x != 0; }) <= 1;
    };
    for (auto& p : plain)
        if (!one({p.p, p.q})) return false;
    for (auto& b : blocks)
        if (!one({b.p, b.q, b.r}) || !one({b.s, b.t, b.u}) || !one({b.p, b.s}) || !one({b.q, b.t}) ||
            !one({b.r, b.u}))
            return false;
    for (auto& [i, a] : frozen)
        if (a < 0) return false;
    return true;
}

CanonicalForm canonical_form(const Monomial& m, const FamilyConfig& cfg) {
    check_alphabet(m, cfg);
    CanonicalForm c;
    for (auto& pn : cfg.plain) {
        long long a = m.exponent(pn.neg), b = m.exponent(pn.pos), f = std::min(a, b);
        c.frozen.push_back({pn.node, f});
        c.plain.push_back({pn.node, a - f, b - f});
    }
    for (auto& bl : cfg.blocks) {
        long long e0 = m.exponent(bl.v0), e1 = m.exponent(bl.v1), e2 = m.exponent(bl.v2);
        long long f = std::min({e0, e1, e2});
        e0 -= f, e1 -= f, e2 -= f;
        BlockPart bp{bl.node};
        if (e0 == 0) bp.p = std::min(e1, e2), bp.t = e1 - bp.p, bp.u = e2 - bp.p;
        else if (e1 == 0) bp.q = std::min(e0, e2), bp.s = e0 - bp.q, bp.u = e2 - bp.q;
        else bp.r = std::min(e0, e1), bp.s = e0 - bp.r, bp.t = e1 - bp.r;
        c.frozen.push_back({bl.node, f});
        c.blocks.push_back(bp);
    }
    std::sort(c.frozen.begin(), c.frozen.end());
    return c;
}

Monomial reconstruct(const CanonicalForm& c, const FamilyConfig& cfg) {
    Monomial m;
    auto F = cfg.frozen_monomials();
    for (auto& [i, a] : c.frozen)
        for (auto& [j, f] : F)
            if (i == j) m = m * f.pow(int(a));
    for (size_t t = 0; t < c.plain.size(); ++t) {
        m.add(cfg.plain[t].neg, int(c.plain[t].p));
        m.add(cfg.plain[t].pos, int(c.plain[t].q));
    }
    for (size_t t = 0; t < c.blocks.size(); ++t) {
        auto& b = c.blocks[t];
        auto& bl = cfg.blocks[t];
        m.add(bl.v0, int(b.q + b.r + b.s));
        m.add(bl.v1, int(b.p + b.r + b.t));
        m.add(bl.v2, int(b.p + b.q + b.u));
    }
    return m;
}

RootVec G(const Monomial& m, const FamilyConfig& cfg) {
    CanonicalForm c = canonical_form(m, cfg);
    RootVec g(cfg.dim(), 0);
    for (auto& p : c.plain) g[size_t(p.node)] += -p.p + p.q;
    for (size_t t = 0; t < c.blocks.size(); ++t) {
        auto& b = c.blocks[t];
        auto& bl = cfg.blocks[t];
        g[size_t(bl.x)] += -b.p + b.q + b.r + b.s;
        g[size_t(bl.y)] += 2 * b.q + b.s - b.t + b.u;
        for (int w : cfg.neighbors(bl.y))
            if (w != bl.x) g[size_t(w)] += b.q + b.u;
    }
    return g;
}

std::pair<std::vector<std::pair<int, long long>>, Monomial> strip_frozen(const Monomial& m, const FamilyConfig& cfg) {
    CanonicalForm c = canonical_form(m, cfg);
    Monomial rest = m;
    for (auto& [i, a] : c.frozen)
        for (auto& [j, f] : cfg.frozen_monomials())
            if (i == j && a > 0) rest = *rest.divide(f.pow(int(a)));
    return {c.frozen, rest};
}

char region_of(long long X, long long Y) {
    if (X > 0 && 0 <= Y && Y <= X) return 'A';
    if (X <= Y && Y <= 2 * X) return 'B';
    if (Y >= 2 * X && X >= 0) return 'C';
    if (X <= 0 && Y >= 0) return 'D';
    if (X <= 0 && Y <= 0) return 'E';
    return 'F';
}

bool region_closure_contains(char region, long long X, long long Y) {
    switch (region) {
        case 'A': return X >= 0 && Y >= 0 && Y <= X;
        case 'B': return X <= Y && Y <= 2 * X;
        case 'C': return Y >= 2 * X && X >= 0;
        case 'D': return X <= 0 && Y >= 0;
        case 'E': return X <= 0 && Y <= 0;
        case 'F': return X >= 0 && Y <= 0;
    }
    return false;
}

Monomial region_monomial(char region, const Block& bl, long long X, long long Y) {
    Monomial m;
    auto put = [&](const Letter& l, long long e) {
        if (e < 0) throw DomainError("region formula evaluated outside its region");
        m.add(l, int(e));
    };
    switch (region) {
        case 'A': put(bl.v0, X - Y), put(bl.v1, X - Y), put(bl.v0, Y); break;
        case 'B': put(bl.v0, Y - X), put(bl.v2, Y - X), put(bl.v0, 2 * X - Y); break;
        case 'C': put(bl.v0, X), put(bl.v2, X), put(bl.v2, Y - 2 * X); break;
        case 'D': put(bl.v1, -X), put(bl.v2, -X), put(bl.v2, Y); break;
        case 'E': put(bl.v1, -X), put(bl.v2, -X), put(bl.v1, -Y); break;
        case 'F': put(bl.v0, X), put(bl.v1, X), put(bl.v1, -Y); break;
        default: throw DomainError("unknown region");
    }
    return m;
}

Monomial G_inverse(const RootVec& gamma, const FamilyConfig& cfg) {
    if (!cfg.has_g) throw DomainError("family " + cfg.key.name() + " has no monomial model");
    if (gamma.size() != cfg.dim()) throw DomainError("root vector has wrong dimension for " + cfg.key.name());
    Monomial m;
    for (auto& bl : cfg.blocks) {
        long long X = gamma[size_t(bl.x)], Y = gamma[size_t(bl.y)];
        m = m * region_monomial(region_of(X, Y), bl, X, Y);
    }
    RootVec g = G(m, cfg);
    for (auto& pn : cfg.plain) {
        long long b = gamma[size_t(pn.node)] - g[size_t(pn.node)];
        if (b > 0) m.add(pn.pos, int(b));
        else if (b < 0) m.add(pn.neg, int(-b));
    }
    if (G(m, cfg) != gamma)
        throw InvariantError("G(G_inverse(gamma)) != gamma for " + format_rootvec(gamma) + " in " + cfg.key.name());
    return m;
}

RootVec family_to_standard(const RootVec& v, const FamilyConfig& cfg) {
    RootVec r(v.size(), 0);
    for (size_t i = 0; i < v.size(); ++i) r[size_t(cfg.to_standard[i])] = v[i];
    return r;
}

RootVec standard_to_family(const RootVec& v, const FamilyConfig& cfg) {
    RootVec r(v.size(), 0);
    for (size_t i = 0; i < v.size(); ++i) r[i] = v[size_t(cfg.to_standard[i])];
    return r;
}

// ---------------------------------------------------------------- family context

RootVec FamilyContext::d_vector(const LaurentPoly& y) const {
    auto ex = seed.matrix.exchangeable();
    auto d = d_vector_of(y, ex);
    RootVec r(cfg.dim(), 0);
    for (size_t p = 0; p < ex.size(); ++p) r[size_t(root_of[ex[p]])] = d[p];
    return r;
}

ExchangeMatrix FamilyContext::standard_principal(const ExchangeMatrix& B) const {
    const size_t dim = cfg.dim();
    ExchangeMatrix P;
    for (size_t i = 0; i < dim; ++i) P.ids.push_back(std::to_string(i));
    P.frozen.assign(dim, false);
    P.b.assign(dim, std::vector<int>(dim, 0));
    for (size_t u : B.exchangeable())
        for (size_t v : B.exchangeable())
            P.b[size_t(cfg.to_standard[size_t(root_of[u])])][size_t(cfg.to_standard[size_t(root_of[v])])] = B.b[u][v];
    return P;
}

namespace {

std::shared_ptr<FamilyContext> build_context(const FamilyKey& key) {
    auto ctx = std::make_shared<FamilyContext>();
    ctx->cfg = make_family(key);
    if (!ctx->cfg.has_g) throw DomainError("family " + key.name() + " has no monomial model (table row only)");
    TheoremResult thm = theorem_mutation_sequence(key);
    std::vector<Monomial> labels;
    for (auto& l : *thm.seed.labels) labels.push_back(l.shifted(ctx->cfg.label_shift));
    ctx->seed = initial_seed(thm.seed.matrix, labels);
    const auto& B = ctx->seed.matrix;
    auto F = ctx->cfg.frozen_monomials();
    std::set<int> seen_roots, seen_frozen;
    for (size_t u = 0; u < B.size(); ++u) {
        ctx->root_of.push_back(-1);
        ctx->frozen_of.push_back(-1);
        if (B.frozen[u]) {
            for (auto& [i, f] : F)
                if (f == labels[u]) ctx->frozen_of[u] = i;
            if (ctx->frozen_of[u] < 0 || !seen_frozen.insert(ctx->frozen_of[u]).second)
                throw InvariantError("frozen label " + format_monomial(labels[u]) + " of " + key.name() +
                                     " is not a distinct F_i");
            continue;
        }
        RootVec g = G(labels[u], ctx->cfg);
        int r = -1;
        for (size_t i = 0; i < g.size(); ++i) {
            if (g[i] == -1 && r < 0) r = int(i);
            else if (g[i] != 0) r = -2;
        }
        if (r < 0 || !seen_roots.insert(r).second)
            throw InvariantError("initial label " + format_monomial(labels[u]) + " of " + key.name() +
                                 " does not map to a distinct -alpha_i");
        ctx->root_of[u] = r;
    }
    // Arrows of the principal part must be edges of the family's affine diagram.
    std::set<std::pair<int, int>> E;
    for (auto [a, b] : ctx->cfg.edges) E.insert({std::min(a, b), std::max(a, b)});
    size_t arrows = 0;
    for (size_t u : B.exchangeable())
        for (size_t v : B.exchangeable())
            if (u < v && B.b[u][v] != 0) {
                ++arrows;
                int a = ctx->root_of[u], b = ctx->root_of[v];
                if (!E.count({std::min(a, b), std::max(a, b)}))
                    throw InvariantError("principal arrow of " + key.name() + " is not a diagram edge");
            }
    if (arrows != E.size()) throw InvariantError("principal quiver of " + key.name() + " misses diagram edges");
    ctx->fan = std::make_shared<FanContext>(AffineSystem::make(ctx->cfg.target), ctx->standard_principal(B));
    return ctx;
}

}  // namespace

std::shared_ptr<const FamilyContext> family_context(const FamilyKey& key) {
    static std::map<std::pair<int, int>, std::shared_ptr<FamilyContext>> cache;
    auto k = std::make_pair(int(key.kind), key.n);
    auto it = cache.find(k);
    if (it == cache.end()) it = cache.emplace(k, build_context(key)).first;
    return it->second;
}

std::shared_ptr<const FamilyContext> family_context_for_type(const AffineTag& tag) {
    if (tag.type == 'D') return family_context({FamilyKind::Dn_s1, tag.n});
    if (tag.type == 'E') return family_context({FamilyKind::En_s1, tag.n});
    throw DomainError("unsupported affine type " + tag.name());
}

// ---------------------------------------------------------------- classification

std::vector<Factor> factorize(const Monomial& m, const FamilyContext& ctx) {
    const auto& cfg = ctx.cfg;
    auto [frozen, rest] = strip_frozen(m, cfg);
    RootVec gamma = family_to_standard(G(m, cfg), cfg);
    Expansion e = ctx.fan->cluster_expansion(gamma);
    std::vector<Factor> out;
    Monomial prod;
    auto F = cfg.frozen_monomials();
    for (auto& [i, a] : frozen) {
        if (a == 0) continue;
        for (auto& [j, f] : F)
            if (i == j) {
                Factor fa{Factor::Frozen, i, {}, a, f.pow(int(a))};
                prod = prod * fa.monomial;
                out.push_back(fa);
            }
    }
    for (auto& [r, mult] : e.real) {
        RootVec scaled = r;
        for (auto& x : scaled) x *= mult;
        Factor fa{Factor::Real, -1, r, mult, G_inverse(standard_to_family(scaled, cfg), cfg)};
        prod = prod * fa.monomial;
        out.push_back(fa);
    }
    if (e.delta > 0) {
        RootVec d = ctx.fan->sys().delta;
        for (auto& x : d) x *= e.delta;
        Factor fa{Factor::Delta, -1, {}, e.delta, G_inverse(standard_to_family(d, cfg), cfg)};
        prod = prod * fa.monomial;
        out.push_back(fa);
    }
    if (prod != m)
        throw InvariantError("factor product " + format_monomial(prod) + " does not reproduce " + format_monomial(m));
    return out;
}

Classification classify(const Monomial& m, const FamilyContext& ctx) {
    Classification c;
    c.gamma_family = G(m, ctx.cfg);
    c.gamma = family_to_standard(c.gamma_family, ctx.cfg);
    c.expansion = ctx.fan->cluster_expansion(c.gamma);
    c.m_delta = c.expansion.delta;
    c.real = c.m_delta == 0;
    if (c.real && !c.expansion.real.empty()) {
        auto r = ctx.fan->real_expansion(c.gamma);
        if (!r) throw InvariantError("real expansion lost its certificate");
        c.certificate = r->word;
        c.cluster_monomial = certificate_monomial(ctx, *r);
        if (c.cluster_monomial != strip_frozen(m, ctx.cfg).second)
            throw InvariantError("certificate of " + format_monomial(m) + " replays to " +
                                 format_monomial(c.cluster_monomial));
    }
    c.factors = factorize(m, ctx);
    return c;
}

Monomial certificate_monomial(const FamilyContext& ctx, const RealExpansion& cert) {
    const auto& cfg = ctx.cfg;
    Seed S = ctx.seed;
    S.vars.clear();
    auto ex = S.matrix.exchangeable();
    // node of each standard label
    std::vector<size_t> node_of(cfg.dim());
    for (size_t u : ex) node_of[size_t(cfg.to_standard[size_t(ctx.root_of[u])])] = u;
    DVectorTuple D = initial_d_tuple(ex.size());
    std::vector<size_t> pos_of(S.matrix.size(), 0);
    for (size_t p = 0; p < ex.size(); ++p) pos_of[ex[p]] = p;
    auto dvec_family = [&](const std::vector<int>& row) {
        RootVec r(cfg.dim(), 0);
        for (size_t p = 0; p < ex.size(); ++p) r[size_t(ctx.root_of[ex[p]])] = row[p];
        return r;
    };
    for (int k : cert.word) {
        size_t u = node_of[size_t(k)];
        DVectorTuple ND = d_tuple_mutate(D, S.matrix, pos_of[u]);
        RootVec want = dvec_family(ND[pos_of[u]]);
        S = monomial_seed_mutate(S, u, [&](const LabelCandidates& c) -> std::optional<Monomial> {
            bool a = G(c.up, cfg) == want, b = G(c.down, cfg) == want;
            if (a == b) return std::nullopt;
            return a ? c.up : c.down;
        });
        D = ND;
    }
    Monomial prod;
    for (auto& [root, mult] : cert.coeffs) {
        RootVec fam = standard_to_family(root, cfg);
        bool found = false;
        for (size_t p = 0; p < ex.size() && !found; ++p)
            if (dvec_family(D[p]) == fam) {
                prod = prod * (*S.labels)[ex[p]].pow(int(mult));
                found = true;
            }
        if (!found) throw InvariantError("certificate names a root outside its cluster");
    }
    return prod;
}

}  // namespace catcluster
