#include "catcluster/verify.hpp"

#include <fnmatch.h>

#include <chrono>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "catcluster/transitions.hpp"

namespace catcluster {

namespace {

using K = FamilyKind;

std::vector<FamilyKey> g_families() {
    std::vector<FamilyKey> out;
    for (auto& k : theorem_table_keys())
        if (make_family(k).has_g) out.push_back(k);
    return out;
}

Monomial L(std::initializer_list<std::tuple<int, int, int>> ts) {
    Monomial m;
    for (auto [i, p, e] : ts) m.add({i, p}, e);
    return m;
}

std::string vec_str(const std::vector<int>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

// Enumerate every vector in [-box, box]^dim.
template <class F>
bool for_box(size_t dim, long long box, F&& f) {
    RootVec g(dim, -box);
    while (true) {
        if (!f(g)) return false;
        size_t i = 0;
        while (i < dim && g[i] == box) g[i++] = -box;
        if (i == dim) return true;
        ++g[i];
    }
}

// Enumerate monomials of degree <= d over a sorted alphabet.
template <class F>
bool for_monomials(const std::vector<Letter>& alpha, int d, F&& f) {
    Monomial m;
    std::function<bool(size_t, int)> rec = [&](size_t from, int left) {
        if (!f(m)) return false;
        if (left == 0) return true;
        for (size_t i = from; i < alpha.size(); ++i) {
            m.add(alpha[i], 1);
            bool ok = rec(i, left - 1);
            m.add(alpha[i], -1);
            if (!ok) return false;
        }
        return true;
    };
    return rec(0, d);
}

// ---- theorem table

std::string check_theorem_rows(const std::vector<FamilyKey>& rows) {
    for (auto& key : rows) {
        FamilyConfig cfg = make_family(key);
        auto rep = admissible_validate(cfg.fin, cfg.sequence);
        if (!rep.ok)
            return key.name() + ": sequence not admissible at " + std::to_string(rep.index) + " (condition " +
                   std::to_string(rep.condition) + ")";
        auto r = rho(cfg.fin, cfg.sequence);
        Sequence back = rho_inverse(cfg.fin, r.q, r.word);
        if (!std::equal(back.begin(), back.end(), cfg.sequence.begin()))
            return key.name() + ": rho_inverse(rho(s)) differs from the first window";
        TheoremResult t;
        try {
            t = theorem_mutation_sequence(key);
        } catch (const std::exception& e) {
            return key.name() + ": " + e.what();
        }
        if (!t.detected || !(t.detected->tag == cfg.target))
            return key.name() + ": expected " + cfg.target.name();
    }
    return "";
}

// ---- transitions

struct Sec6Case {
    std::string name, to, source, image;
};

const std::vector<Sec6Case>& sec6_cases() {
    static const std::vector<Sec6Case> cs = {
        {"i0-i1/c1", "132413241324", "1,0,0,0,0,0,0,0,1,0,0,0", "0,1,0,0,0,0,0,0,0,1,0,0"},
        {"i0-i2/c1", "123412341234", "1,0,0,0,0,0,0,0,1,0,0,0", "0,0,1,0,0,0,0,0,0,0,1,0"},
        {"i0-i3/c1", "124312431243", "1,0,0,0,0,0,0,0,1,0,0,0", "0,0,0,1,0,0,0,0,0,0,0,1"},
        {"i0-iprime/c1", "132431432434", "1,0,0,0,0,0,0,0,1,0,0,0", "0,1,0,0,0,0,1,0,0,0,1,0"},
        {"i0-i1/c2", "132413241324", "0,1,1,1,0,0,0,0,0,1,1,1", "1,0,0,0,1,1,0,0,0,0,1,1"},
        {"i0-i2/c2", "123412341234", "0,1,1,1,0,0,0,0,0,1,1,1", "1,1,0,0,0,0,1,1,0,0,0,1"},
        {"i0-i3/c2", "124312431243", "0,1,1,1,0,0,0,0,0,1,1,1", "1,1,1,0,0,0,0,0,1,1,1,0"},
        // Not displayed in the source; frozen from the agreement of the direct
        // path with the composite through i1.
        {"i0-iprime/c2", "132431432434", "0,1,1,1,0,0,0,0,0,1,1,1", "1,0,0,0,1,0,0,1,0,1,0,1"},
    };
    return cs;
}

const char* kI0 = "312431243124";

std::string check_sec6(const Sec6Case& c) {
    FiniteType t{'D', 4};
    auto from = parse_word(kI0, t), to = parse_word(c.to, t);
    auto got = format_tuple(transition_tuple(t, from, to, parse_tuple(c.source, 12)));
    return got == c.image ? "" : "got " + got + ", expected " + c.image;
}

std::vector<std::pair<std::string, std::string>> transition_pairs() {
    std::vector<std::pair<std::string, std::string>> ps;
    for (auto& w : {"132413241324", "123412341234", "124312431243", "132431432434"}) ps.push_back({kI0, w});
    ps.push_back({"132413241324", "132431432434"});
    return ps;
}

std::string check_transition_inverse(const CheckOptions& o) {
    FiniteType t{'D', 4};
    std::mt19937_64 rng(o.rng_seed);
    std::uniform_int_distribution<int> d(0, 6);
    for (auto& [a, b] : transition_pairs()) {
        auto wa = parse_word(a, t), wb = parse_word(b, t);
        auto fwd = find_move_path(t, wa, wb), bwd = find_move_path(t, wb, wa);
        for (int s = 0; s < 200; ++s) {
            LusztigTuple c(12);
            for (auto& x : c) x = d(rng);
            if (transition_along(transition_along(c, fwd), bwd) != c)
                return a + "->" + b + " on " + format_tuple(c);
        }
    }
    return "";
}

std::string check_transition_paths(const CheckOptions& o) {
    FiniteType t{'D', 4};
    std::mt19937_64 rng(o.rng_seed ^ 0x5bd1e995);
    std::uniform_int_distribution<int> d(0, 6);
    auto i1 = parse_word("132413241324", t);
    for (auto& [a, b] : transition_pairs()) {
        auto wa = parse_word(a, t), wb = parse_word(b, t);
        auto p1 = find_move_path(t, wa, wb), p2 = find_move_path_reversed(t, wa, wb);
        if (p1 == p2) return a + "->" + b + ": the two searches gave the same path";
        // A third path through i1 when neither end is i1.
        std::optional<std::vector<Move>> p3;
        if (wa != i1 && wb != i1) {
            p3 = find_move_path(t, wa, i1);
            auto tail = find_move_path(t, i1, wb);
            p3->insert(p3->end(), tail.begin(), tail.end());
        }
        for (int s = 0; s < 200; ++s) {
            LusztigTuple c(12);
            for (auto& x : c) x = d(rng);
            auto x1 = transition_along(c, p1);
            if (transition_along(c, p2) != x1 || (p3 && transition_along(c, *p3) != x1))
                return a + "->" + b + " on " + format_tuple(c);
        }
    }
    return "";
}

// ---- G and G inverse

std::string check_delta_closed_form(const FamilyKey& key) {
    FamilyConfig cfg = make_family(key);
    RootVec d = standard_to_family(AffineSystem::make(cfg.target).delta, cfg);
    Monomial want = delta_closed_form(key), got = G_inverse(d, cfg);
    if (got != want) return key.name() + ": G_inverse(delta) = " + format_monomial(got) + ", expected " + format_monomial(want);
    if (G(want, cfg) != d) return key.name() + ": G of the closed form is " + format_rootvec(G(want, cfg));
    return "";
}

long long roundtrip_box(const FamilyKey& k) { return k.n == 4 ? 4 : 2; }

std::string check_g_roundtrip(const FamilyKey& key) {
    FamilyConfig cfg = make_family(key);
    std::string err;
    for_box(cfg.dim(), roundtrip_box(key), [&](const RootVec& g) {
        Monomial m = G_inverse(g, cfg);
        auto [fr, rest] = strip_frozen(m, cfg);
        for (auto& [i, a] : fr)
            if (a) err = format_rootvec(g) + ": G_inverse has a frozen factor";
        if (err.empty() && !canonical_form(m, cfg).constraints_hold())
            err = format_rootvec(g) + ": canonical constraints violated";
        return err.empty();
    });
    return err.empty() ? "" : key.name() + ": " + err;
}

std::string check_gprime_roundtrip(const FamilyKey& key) {
    FamilyConfig cfg = make_family(key);
    std::vector<Letter> alpha(cfg.alphabet.begin(), cfg.alphabet.end());
    std::string err;
    for_monomials(alpha, 6, [&](const Monomial& m) {
        auto c = canonical_form(m, cfg);
        if (!c.constraints_hold()) err = format_monomial(m) + ": constraints";
        else if (reconstruct(c, cfg) != m) err = format_monomial(m) + ": reconstruct";
        else if (G_inverse(G(m, cfg), cfg) != strip_frozen(m, cfg).second)
            err = format_monomial(m) + ": G_inverse(G(m)) = " + format_monomial(G_inverse(G(m, cfg), cfg));
        return err.empty();
    });
    return err.empty() ? "" : key.name() + ": " + err;
}

std::string check_region_boundaries() {
    const Block bl{0, {0, 0}, {0, 2}, {0, 4}, 0, 1};
    const std::string regions = "ABCDEF";
    for (long long X = -6; X <= 6; ++X)
        for (long long Y = -12; Y <= 12; ++Y) {
            char home = region_of(X, Y);
            if (!region_closure_contains(home, X, Y))
                return "region_of(" + std::to_string(X) + "," + std::to_string(Y) + ") outside its own closure";
            Monomial m = region_monomial(home, bl, X, Y);
            for (char r : regions)
                if (r != home && region_closure_contains(r, X, Y) && region_monomial(r, bl, X, Y) != m)
                    return std::string("regions ") + home + "/" + r + " disagree at (" + std::to_string(X) + "," +
                           std::to_string(Y) + ")";
        }
    return "";
}

// ---- classification

std::string check_classify_imaginary_example() {
    auto ctx = family_context({K::Dn_s1, 4});
    auto c = classify(parse_monomial("3_0 3_4"), *ctx);
    if (c.real || c.m_delta != 1) return "3_0 3_4: real=" + std::to_string(c.real) + " m_delta=" + std::to_string(c.m_delta);
    return "";
}

std::string check_classify_initial_real(const FamilyKey& key) {
    auto ctx = family_context(key);
    for (size_t u : ctx->seed.matrix.exchangeable()) {
        const Monomial& m = (*ctx->seed.labels)[u];
        auto c = classify(m, *ctx);
        if (!c.real) return key.name() + ": " + format_monomial(m) + " classified imaginary";
        if (c.certificate.size() != 0) return key.name() + ": initial label needs a nonempty certificate";
    }
    return "";
}

std::string check_classify_kdelta(const FamilyKey& key) {
    auto ctx = family_context(key);
    RootVec d = ctx->fan->sys().delta;
    for (long long k = 1; k <= 3; ++k) {
        RootVec g = d;
        for (auto& x : g) x *= k;
        Monomial m = G_inverse(standard_to_family(g, ctx->cfg), ctx->cfg);
        auto c = classify(m, *ctx);
        if (c.real || c.m_delta != k)
            return key.name() + ": k=" + std::to_string(k) + " gives m_delta " + std::to_string(c.m_delta);
    }
    return "";
}

std::string check_imaginary_divisibility(const FamilyKey& key, const CheckOptions& o) {
    auto ctx = family_context(key);
    if (o.budget) ctx->fan->set_budget_override(o.budget);
    const auto& cfg = ctx->cfg;
    RootVec dstd = ctx->fan->sys().delta;
    Monomial md = G_inverse(standard_to_family(dstd, cfg), cfg);
    // Samples are k*delta plus a few summands drawn from Lambda and small real roots,
    // so both verdicts occur.
    std::vector<RootVec> pool = ctx->fan->candidates(1);
    for (auto& comp : ctx->fan->lambda()) pool.insert(pool.end(), comp.begin(), comp.end());
    std::mt19937_64 rng(o.rng_seed + 17);
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    std::uniform_int_distribution<int> kd(0, 2), jd(0, 3);
    size_t imag = 0;
    for (int s = 0; s < 400; ++s) {
        RootVec g(cfg.dim(), 0);
        int k = kd(rng), j = jd(rng);
        for (size_t i = 0; i < g.size(); ++i) g[i] = k * dstd[i];
        for (int t = 0; t < j; ++t) {
            const RootVec& r = pool[pick(rng)];
            for (size_t i = 0; i < g.size(); ++i) g[i] += r[i];
        }
        if (std::all_of(g.begin(), g.end(), [](long long x) { return x == 0; })) continue;
        Monomial m = G_inverse(standard_to_family(g, cfg), cfg);
        auto c = classify(m, *ctx);
        if (!c.real) {
            ++imag;
            if (!m.divisible_by(md)) return key.name() + ": imaginary " + format_monomial(m) + " not divisible";
        }
    }
    if (imag == 0) return key.name() + ": no imaginary sample was drawn";
    return "";
}

// ---- root systems

std::string check_lambda(const AffineTag& tag) {
    auto ctx = family_context_for_type(tag);
    const FanContext& fan = *ctx->fan;
    const auto& sys = fan.sys();
    auto comps = fan.lambda();
    std::set<RootVec> all;
    for (auto& c : comps) all.insert(c.begin(), c.end());
    for (auto& c : comps)
        for (auto& b : c) {
            auto orb = c_orbit_classify(sys, fan.coxeter(), b, default_orbit_cap(sys));
            if (!orb.finite) return format_rootvec(b) + " has infinite c-orbit";
            RootVec comp = sys.delta;
            for (size_t i = 0; i < comp.size(); ++i) comp[i] -= b[i];
            if (!all.count(comp)) return format_rootvec(b) + ": delta complement missing";
            if (!fan.compatible(PhiC::delta(), PhiC::real(b))) return format_rootvec(b) + " not compatible with delta";
        }
    for (size_t i = 0; i < comps.size(); ++i)
        for (size_t j = i + 1; j < comps.size(); ++j)
            for (auto& a : comps[i])
                for (auto& b : comps[j])
                    if (!fan.compatible(PhiC::real(a), PhiC::real(b)))
                        return format_rootvec(a) + " and " + format_rootvec(b) + " not compatible";
    return "";
}

std::string check_oracle(const AffineTag& tag, int box, const CheckOptions& o) {
    auto ctx = family_context_for_type(tag);
    const FanContext& fan = *ctx->fan;
    if (o.budget) ctx->fan->set_budget_override(o.budget);
    std::string err;
    for_box(fan.sys().dim(), box, [&](const RootVec& g) {
        auto survivors = fan.brute_force_oracle(g, box);
        if (survivors.size() != 1) {
            err = format_rootvec(g) + ": " + std::to_string(survivors.size()) + " oracle survivors";
            return false;
        }
        Expansion e;
        try {
            e = fan.cluster_expansion(g);
        } catch (const std::exception& x) {
            err = format_rootvec(g) + ": " + x.what();
            return false;
        }
        if (!(e == survivors[0])) err = format_rootvec(g) + ": " + expansion_json(e) + " vs " + expansion_json(survivors[0]);
        return err.empty();
    });
    return err;
}

// ---- seeds

std::string check_mutation_involution(const CheckOptions& o) {
    std::mt19937_64 rng(o.rng_seed + 3);
    for (auto key : {FamilyKey{K::Dn_s1, 4}, FamilyKey{K::D4_s2, 4}, FamilyKey{K::En_s1, 6}}) {
        auto ctx = family_context(key);
        Seed S = ctx->seed;
        auto ex = S.matrix.exchangeable();
        std::uniform_int_distribution<size_t> pick(0, ex.size() - 1);
        for (int step = 0; step < 12; ++step) {
            size_t k = ex[pick(rng)];
            Seed T = seed_mutate(seed_mutate(S, k), k);
            if (!(T.matrix == S.matrix)) return key.name() + ": matrix not restored at node " + S.matrix.ids[k];
            for (size_t v = 0; v < S.vars.size(); ++v)
                if (!(*T.vars[v] == *S.vars[v])) return key.name() + ": variable not restored at node " + S.matrix.ids[k];
            S = seed_mutate(S, k);
        }
    }
    return "";
}

std::string check_frozen_invariance(const CheckOptions& o) {
    std::mt19937_64 rng(o.rng_seed + 5);
    for (auto key : {FamilyKey{K::Dn_s1, 4}, FamilyKey{K::D4_s2, 4}, FamilyKey{K::En_s1, 6}, FamilyKey{K::An_s1, 5}}) {
        auto ctx = family_context(key);
        const Seed& S0 = ctx->seed;
        auto ex = S0.matrix.exchangeable();
        auto fz = S0.matrix.frozen_nodes();
        std::uniform_int_distribution<size_t> pick(0, ex.size() - 1);
        Seed S = S0;
        for (int step = 0; step < 10; ++step) {
            size_t k = ex[pick(rng)];
            S = monomial_seed_mutate(S, k, [&](const LabelCandidates& c) -> std::optional<Monomial> {
                RootVec want = ctx->d_vector(exchange_numerator(S, k).divide_exact(*S.vars[k]));
                bool a = G(c.up, ctx->cfg) == want, b = G(c.down, ctx->cfg) == want;
                if (a == b) return std::nullopt;
                return a ? c.up : c.down;
            });
            for (size_t f : fz) {
                if (!(*S.vars[f] == *S0.vars[f]) || (*S.labels)[f] != (*S0.labels)[f])
                    return key.name() + ": frozen node " + S.matrix.ids[f] + " changed";
                for (size_t g : fz)
                    if (S.matrix.b[f][g] != 0) return key.name() + ": frozen-frozen entry appeared";
            }
        }
    }
    return "";
}

std::string explore_check(const FamilyKey& key, const ExploreOptions& opt) {
    auto ctx = family_context(key);
    auto r = explore_labeled_seeds(*ctx, opt);
    return r.failure.empty() ? "" : key.name() + ": " + r.failure;
}

std::vector<CheckInfo> build_registry() {
    std::vector<CheckInfo> R;
    auto add = [&](std::string id, int crit, std::function<std::string(const CheckOptions&)> f) {
        R.push_back({std::move(id), crit, std::move(f)});
    };
    auto rows = [](std::initializer_list<FamilyKey> ks) {
        std::vector<FamilyKey> v(ks);
        return [v](const CheckOptions&) { return check_theorem_rows(v); };
    };
    add("theorem-table/Dn_s1", 1, rows({{K::Dn_s1, 4}, {K::Dn_s1, 5}, {K::Dn_s1, 6}}));
    add("theorem-table/D4_s2", 1, rows({{K::D4_s2, 4}}));
    add("theorem-table/En_s1", 1, rows({{K::En_s1, 6}, {K::En_s1, 7}, {K::En_s1, 8}}));
    add("theorem-table/A2_s1", 1, rows({{K::An_s1, 2}}));
    add("theorem-table/A3_s1", 1, rows({{K::An_s1, 3}}));
    add("theorem-table/A4_s1", 1, rows({{K::An_s1, 4}}));
    add("theorem-table/An_s1", 1, rows({{K::An_s1, 5}, {K::An_s1, 6}}));

    for (auto& c : sec6_cases()) add("sec6/" + c.name, 2, [&c](const CheckOptions&) { return check_sec6(c); });

    std::vector<FamilyKey> closed = {{K::Dn_s1, 4}, {K::Dn_s1, 5}, {K::Dn_s1, 6}, {K::Dn_s1, 7}, {K::Dn_s1, 8},
                                     {K::D4_s2, 4}, {K::En_s1, 6}, {K::En_s1, 7}, {K::En_s1, 8}, {K::An_s1, 5},
                                     {K::An_s1, 6}, {K::An_s1, 7}, {K::An_s1, 8}};
    for (auto& k : closed)
        add("ginv-delta/" + k.name(), 3, [k](const CheckOptions&) { return check_delta_closed_form(k); });

    ExploreOptions labels;
    labels.depth = 6;
    for (auto k : {FamilyKey{K::Dn_s1, 4}, FamilyKey{K::D4_s2, 4}, FamilyKey{K::En_s1, 6}, FamilyKey{K::An_s1, 5}})
        add("g-equals-d/" + k.name(), 4, [k, labels](const CheckOptions&) { return explore_check(k, labels); });

    add("oracle/D4_1-box3", 5, [](const CheckOptions& o) { return check_oracle({'D', 4}, 3, o); });
    add("oracle/E6_1-box2", 5, [](const CheckOptions& o) { return check_oracle({'E', 6}, 2, o); });

    add("classify/imaginary-3_0-3_4", 6, [](const CheckOptions&) { return check_classify_imaginary_example(); });
    add("classify/initial-labels-real", 6,
        [](const CheckOptions&) { return check_classify_initial_real({K::Dn_s1, 4}); });
    for (auto& k : g_families())
        add("classify/k-delta/" + k.name(), 6, [k](const CheckOptions&) { return check_classify_kdelta(k); });

    for (auto t : {AffineTag{'D', 4}, AffineTag{'D', 5}, AffineTag{'D', 6}, AffineTag{'E', 6}})
        add("lambda/" + t.name(), 7, [t](const CheckOptions&) { return check_lambda(t); });

    add("property/mutation-involution", 8, check_mutation_involution);
    ExploreOptions pos;
    pos.depth = 5;
    pos.check_labels = false;
    pos.check_positivity = true;
    pos.check_tropical = true;
    for (auto k : {FamilyKey{K::Dn_s1, 4}, FamilyKey{K::D4_s2, 4}, FamilyKey{K::En_s1, 6}}) {
        add("property/laurent-positivity/" + k.name(), 8, [k, pos](const CheckOptions&) { return explore_check(k, pos); });
    }
    for (auto& k : g_families()) {
        add("property/g-roundtrip/" + k.name(), 8, [k](const CheckOptions&) { return check_g_roundtrip(k); });
        add("property/gprime-roundtrip/" + k.name(), 8, [k](const CheckOptions&) { return check_gprime_roundtrip(k); });
    }
    add("property/region-boundary", 8, [](const CheckOptions&) { return check_region_boundaries(); });
    for (auto k : {FamilyKey{K::Dn_s1, 4}, FamilyKey{K::D4_s2, 4}, FamilyKey{K::En_s1, 6}, FamilyKey{K::An_s1, 5}})
        add("property/imaginary-divisibility/" + k.name(), 8,
            [k](const CheckOptions& o) { return check_imaginary_divisibility(k, o); });
    add("property/frozen-invariance", 8, check_frozen_invariance);
    add("property/transition-inverse", 8, check_transition_inverse);
    add("property/transition-path-independence", 8, check_transition_paths);
    return R;
}

}  // namespace

Monomial delta_closed_form(const FamilyKey& key) {
    const int n = key.n;
    Monomial m;
    auto put = [&](int i, int p, int e = 1) { m.add({i, p}, e); };
    switch (key.kind) {
        case K::Dn_s1:
            if (n == 4) return L({{3, 0, 1}, {3, 4, 1}});
            put(n - 1, 0), put(n - 1, 4), put(n - 2, 3);
            if (n % 2 == 0) {
                put(1, 3), put(2, 3);
                for (int i = 3; i <= n - 3; i += 2) put(i, 0, 2);
                for (int i = 4; i <= n - 4; i += 2) put(i, 3, 2);
            } else {
                put(1, 0), put(2, 0);
                for (int i = 3; i <= n - 4; i += 2) put(i, 3, 2);
                for (int i = 4; i <= n - 3; i += 2) put(i, 0, 2);
            }
            return m;
        case K::D4_s2:
            return L({{1, 0, 1}, {1, 4, 1}, {2, 0, 1}, {2, 4, 1}, {4, 0, 1}, {4, 4, 1}});
        case K::En_s1:
            if (n == 6) return L({{1, 3, 1}, {2, 0, 2}, {3, 3, 2}, {4, 0, 1}, {4, 4, 1}, {5, 0, 2}, {6, 3, 1}});
            if (n == 7)
                return L({{1, 0, 1}, {1, 4, 1}, {2, 3, 2}, {3, 0, 4}, {4, 3, 2}, {5, 3, 3}, {6, 0, 2}, {7, 3, 1}});
            return L({{1, 0, 2}, {2, 3, 4}, {3, 0, 6}, {4, 3, 3}, {5, 3, 5}, {6, 0, 4}, {7, 3, 2}, {8, 0, 1}, {8, 4, 1}});
        case K::An_s1:
            if (n < 5) throw DomainError("no closed form for " + key.name());
            if (n == 5) return L({{2, 1, 1}, {2, 5, 1}, {4, 1, 1}, {4, 5, 1}});
            put(n - 2, 4), put(n - 1, 1), put(n - 1, 5);
            if (n % 2 == 1) {
                put(2, 1), put(2, 5), put(3, 4);
                for (int i = 4; i <= n - 3; i += 2) put(i, 1, 2);
                for (int i = 5; i <= n - 4; i += 2) put(i, 4, 2);
            } else {
                put(2, 0), put(2, 4), put(3, 1);
                for (int i = 4; i <= n - 4; i += 2) put(i, 4, 2);
                for (int i = 5; i <= n - 3; i += 2) put(i, 1, 2);
            }
            return m;
    }
    return m;
}

ExploreReport explore_labeled_seeds(const FamilyContext& ctx, const ExploreOptions& opt) {
    ExploreReport rep;
    const Seed& S0 = ctx.seed;
    const size_t N = S0.matrix.size();
    const auto ex = S0.matrix.exchangeable();
    ClusterVarTable table(N, 0);
    struct State {
        ExchangeMatrix B;
        std::vector<size_t> ids;
        std::vector<Monomial> labels;
        DVectorTuple D;
        std::string path;
    };
    auto key_of = [&](const std::vector<size_t>& ids) {
        std::vector<size_t> k;
        for (size_t u : ex) k.push_back(ids[u]);
        std::sort(k.begin(), k.end());
        return k;
    };
    std::vector<size_t> ids0(N);
    for (size_t v = 0; v < N; ++v) ids0[v] = table.initial(v);
    std::map<size_t, Monomial> label_of_var;
    for (size_t v = 0; v < N; ++v) label_of_var[ids0[v]] = (*S0.labels)[v];
    std::set<std::vector<size_t>> seen{key_of(ids0)};
    std::vector<State> frontier{{S0.matrix, ids0, *S0.labels, initial_d_tuple(ex.size()), ""}};
    rep.seeds = 1;
    auto fail = [&](const State& s, size_t u, const std::string& why) {
        rep.failure = "path [" + s.path + "] then node " + S0.matrix.ids[u] + ": " + why;
    };
    for (int depth = 0; depth < opt.depth && rep.failure.empty(); ++depth) {
        std::vector<State> next;
        for (const State& s : frontier) {
            for (size_t kp = 0; kp < ex.size(); ++kp) {
                size_t u = ex[kp];
                State t{matrix_mutate(s.B, u), s.ids, s.labels, {}, s.path + (s.path.empty() ? "" : ",") + S0.matrix.ids[u]};
                size_t before = table.count();
                t.ids[u] = table.mutate(s.B, s.ids, u);
                const LaurentPoly& y = table.poly(t.ids[u]);
                bool fresh = table.count() > before;
                RootVec d = ctx.d_vector(y);
                if (opt.check_positivity && fresh && !y.nonnegative_coefficients()) {
                    fail(s, u, "negative Laurent coefficient");
                    return rep;
                }
                if (opt.check_tropical) {
                    t.D = d_tuple_mutate(s.D, s.B, kp);
                    std::vector<int> laurent = d_vector_of(y, ex);
                    if (t.D[kp] != laurent) {
                        fail(s, u, "tropical " + vec_str(t.D[kp]) + " vs Laurent " + vec_str(laurent));
                        return rep;
                    }
                }
                if (opt.check_labels) {
                    auto c = label_candidates(s.B, s.labels, u);
                    std::optional<Monomial> chosen;
                    if (c.up_ok && c.down_ok && c.up != c.down) {
                        ++rep.disambiguated;
                        bool a = G(c.up, ctx.cfg) == d, b = G(c.down, ctx.cfg) == d;
                        if (a != b) chosen = a ? c.up : c.down;
                    } else if (c.up_ok) {
                        chosen = c.up;
                    } else if (c.down_ok) {
                        chosen = c.down;
                    }
                    if (!chosen) {
                        fail(s, u, "no exchange candidate matches d-vector " + format_rootvec(d));
                        return rep;
                    }
                    ++rep.label_checks;
                    RootVec g = G(*chosen, ctx.cfg);
                    if (g != d) {
                        fail(s, u, "G(" + format_monomial(*chosen) + ") = " + format_rootvec(g) + " but d = " + format_rootvec(d));
                        return rep;
                    }
                    auto [it, inserted] = label_of_var.emplace(t.ids[u], *chosen);
                    if (!inserted && it->second != *chosen) {
                        fail(s, u, "variable reached with labels " + format_monomial(it->second) + " and " + format_monomial(*chosen));
                        return rep;
                    }
                    t.labels[u] = *chosen;
                }
                if (seen.insert(key_of(t.ids)).second) {
                    ++rep.seeds;
                    next.push_back(std::move(t));
                }
            }
        }
        frontier = std::move(next);
    }
    rep.variables = table.count() - N;
    return rep;
}

const std::vector<CheckInfo>& check_registry() {
    static const std::vector<CheckInfo> R = build_registry();
    return R;
}

bool filter_matches(const std::string& filter, const std::string& id) {
    if (filter.empty() || filter == "*") return true;
    if (fnmatch(filter.c_str(), id.c_str(), 0) == 0) return true;
    return fnmatch((filter + "/*").c_str(), id.c_str(), 0) == 0;
}

std::vector<CheckResult> run_suite(const std::string& filter, const CheckOptions& opts) {
    std::vector<CheckResult> out;
    for (const CheckInfo& c : check_registry()) {
        if (!filter_matches(filter, c.id)) continue;
        CheckResult r;
        r.id = c.id;
        r.criterion = c.criterion;
        auto t0 = std::chrono::steady_clock::now();
        try {
            r.counterexample = c.run(opts);
        } catch (const std::exception& e) {
            r.counterexample = std::string("exception: ") + e.what();
        }
        r.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.pass = r.counterexample.empty();
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace catcluster
