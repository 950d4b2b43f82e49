#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "catcluster/categorification.hpp"
#include "catcluster/cli.hpp"
#include "catcluster/cluster.hpp"
#include "catcluster/laurent.hpp"
#include "catcluster/monomial.hpp"
#include "catcluster/roots.hpp"
#include "catcluster/transitions.hpp"
#include "catcluster/verify.hpp"

using namespace catcluster;

#ifndef CATCLUSTER_TEST_DATA
#define CATCLUSTER_TEST_DATA "tests/data"
#endif

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExchangeMatrix matrix_from(std::vector<std::vector<int>> b) {
    ExchangeMatrix B;
    for (size_t i = 0; i < b.size(); ++i) {
        B.ids.push_back(std::to_string(i));
        B.frozen.push_back(false);
    }
    B.b = std::move(b);
    return B;
}

}  // namespace

TEST_CASE("laurent arithmetic and exact division") {
    auto x = LaurentPoly::variable(2, 0), y = LaurentPoly::variable(2, 1);
    auto one = LaurentPoly::constant(2, 1);
    auto p = (x + y) * (x + y);
    CHECK(p == x * x + x * y + x * y + y * y);
    CHECK(p.divide_exact(x + y) == x + y);
    CHECK_THROWS_AS(p.divide_exact(x + one), InvariantError);
    auto q = LaurentPoly::monomial(2, {-2, 1}, 3);
    CHECK(q.min_exponents() == std::vector<int>{-2, 1});
    CHECK((p - p).is_zero());
    CHECK_FALSE((x - y).nonnegative_coefficients());
}

TEST_CASE("monomial parse and format") {
    auto m = parse_monomial("3_4 3_0*3_0");
    CHECK(m.exponent({3, 0}) == 2);
    CHECK(m.degree() == 3);
    CHECK(format_monomial(m) == "3_0^2 3_4");
    CHECK(format_monomial_token(m) == "3_0^2*3_4");
    CHECK(parse_monomial(format_monomial(m)) == m);
    CHECK_FALSE(m.divide(parse_monomial("1_0")).has_value());
    CHECK(*m.divide(parse_monomial("3_0")) == parse_monomial("3_0 3_4"));
    CHECK(m.shifted(-1) == parse_monomial("3_-1^2 3_3"));
    CHECK_THROWS_AS(parse_monomial("3_"), DomainError);
}

TEST_CASE("matrix mutation") {
    // b' = -b on row/col k, b_ij + sgn(b_ik) max(b_ik b_kj, 0) elsewhere
    auto B = matrix_from({{0, 1, 0}, {-1, 0, 1}, {0, -1, 0}});
    auto M = matrix_mutate(B, 1);
    CHECK(M.b == std::vector<std::vector<int>>{{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}});
    CHECK(matrix_mutate(M, 1) == B);
}

TEST_CASE("A2 exchange pattern has period five") {
    auto B = matrix_from({{0, 1}, {-1, 0}});
    Seed S = initial_seed(B);
    std::vector<LaurentPoly> seen;
    for (int step = 0; step < 10; ++step) {
        S = seed_mutate(S, step % 2);
        seen.push_back(*S.vars[step % 2]);
    }
    auto x1 = LaurentPoly::variable(2, 0), x2 = LaurentPoly::variable(2, 1);
    auto one = LaurentPoly::constant(2, 1);
    CHECK(seen[0] == (x2 + one).divide_exact(x1));
    CHECK(seen[2] == (x1 + one).divide_exact(x2));
    CHECK(*S.vars[0] == x1);
    CHECK(*S.vars[1] == x2);
}

TEST_CASE("seed text parsing") {
    auto f = parse_seed_text("node a\nnode b frozen\na -> b x2\n");
    CHECK(f.matrix.size() == 2);
    CHECK(f.matrix(0, 1) == 2);
    CHECK(f.matrix(1, 0) == -2);
    CHECK_FALSE(f.labels.has_value());
    CHECK_THROWS_AS(parse_seed_text("node a label=1_0\nnode b\n"), DomainError);
    CHECK_THROWS_AS(parse_seed_text("node a\na -> a\n"), DomainError);
    CHECK_THROWS_AS(parse_seed_text("node a\nnode b\na -> b\nb -> a\n"), DomainError);
    CHECK_THROWS_AS(parse_seed_text("node a\na -> c\n"), DomainError);
}

TEST_CASE("affine type detection") {
    // star with four leaves: D4^(1)
    std::vector<std::vector<int>> b(5, std::vector<int>(5, 0));
    for (int i = 1; i < 5; ++i) b[0][i] = 1, b[i][0] = -1;
    auto det = detect_affine_type(matrix_from(b));
    REQUIRE(det.has_value());
    CHECK(det->tag.name() == "D4_1");
    // path on five nodes is finite type A5, not affine
    std::vector<std::vector<int>> p(5, std::vector<int>(5, 0));
    for (int i = 0; i + 1 < 5; ++i) p[i][i + 1] = 1, p[i + 1][i] = -1;
    CHECK_FALSE(detect_affine_type(matrix_from(p)).has_value());
}

TEST_CASE("positive root counts") {
    for (int n = 1; n <= 7; ++n) CHECK(finite_positive_roots({'A', n}).size() == size_t(n * (n + 1) / 2));
    for (int n = 4; n <= 8; ++n) CHECK(finite_positive_roots({'D', n}).size() == size_t(n * (n - 1)));
    CHECK(finite_positive_roots({'E', 6}).size() == 36);
    CHECK(finite_positive_roots({'E', 7}).size() == 63);
    CHECK(finite_positive_roots({'E', 8}).size() == 120);
    CHECK(coxeter_number({'E', 8}) == 30);
    CHECK(longest_length({'D', 4}) == 12);
}

TEST_CASE("finite-orbit set sizes") {
    // sum over the three tubes of (rank - 1), rank r tube holding r(r-1) roots
    auto total = [](const AffineTag& t) {
        size_t s = 0;
        for (auto& c : lambda_components(t)) s += c.size();
        return s;
    };
    CHECK(total({'D', 4}) == 6);
    CHECK(total({'D', 5}) == 10);
    CHECK(total({'E', 6}) == 14);
    CHECK(total({'E', 7}) == 20);
    CHECK(total({'E', 8}) == 28);
}

TEST_CASE("root vector parsing") {
    auto sys = AffineSystem::make({'D', 4});
    CHECK(parse_rootvec("d-a1", 5, sys.delta) == RootVec{1, 0, 1, 2, 1});
    CHECK(parse_rootvec("1,0,0,0,0", 5, sys.delta) == RootVec{1, 0, 0, 0, 0});
    CHECK_THROWS_AS(parse_rootvec("1,0", 5, sys.delta), DomainError);
    CHECK(is_real_root(sys, RootVec{1, 0, 0, 1, 0}));
    CHECK_FALSE(is_real_root(sys, sys.delta));
}

namespace {

// Every node of the transcribed figure must match a seed node with the same
// label, and every arrow not joining two frozen nodes must agree.
void compare_with_figure(const FamilyKey& key, const std::string& file) {
    auto fig = parse_seed_text(slurp(std::string(CATCLUSTER_TEST_DATA) + "/" + file));
    auto ctx = family_context(key);
    const auto& B = ctx->seed.matrix;
    REQUIRE(ctx->seed.labels.has_value());
    REQUIRE(fig.labels.has_value());
    REQUIRE(fig.matrix.size() == B.size());
    std::vector<size_t> where(fig.matrix.size());
    for (size_t i = 0; i < fig.matrix.size(); ++i) {
        size_t hits = 0;
        for (size_t j = 0; j < B.size(); ++j)
            if ((*ctx->seed.labels)[j] == (*fig.labels)[i]) where[i] = j, ++hits;
        INFO(key.name(), " node ", fig.matrix.ids[i]);
        REQUIRE(hits == 1);
        CHECK(B.frozen[where[i]] == fig.matrix.frozen[i]);
    }
    for (size_t i = 0; i < fig.matrix.size(); ++i)
        for (size_t j = 0; j < fig.matrix.size(); ++j) {
            if (fig.matrix.frozen[i] && fig.matrix.frozen[j]) continue;
            INFO(key.name(), " ", fig.matrix.ids[i], " -> ", fig.matrix.ids[j]);
            CHECK(B(where[i], where[j]) == fig.matrix(i, j));
        }
}

}  // namespace

TEST_CASE("theorem seeds match the transcribed figures") {
    compare_with_figure({FamilyKind::Dn_s1, 4}, "D4_s1.seed");
    compare_with_figure({FamilyKind::D4_s2, 4}, "D4_s2.seed");
    compare_with_figure({FamilyKind::En_s1, 6}, "E6_s1.seed");
}

TEST_CASE("G on the null root monomial for D4") {
    auto ctx = family_context({FamilyKind::Dn_s1, 4});
    auto m = parse_monomial("3_0 3_4");
    CHECK(G(m, ctx->cfg) == standard_to_family(ctx->fan->sys().delta, ctx->cfg));
    CHECK(G_inverse(standard_to_family(ctx->fan->sys().delta, ctx->cfg), ctx->cfg) == m);
    auto c = classify(m, *ctx);
    CHECK_FALSE(c.real);
    CHECK(c.m_delta == 1);
}

TEST_CASE("admissible sequences and rho") {
    FiniteType t{'D', 4};
    auto cfg = make_family({FamilyKind::Dn_s1, 4});
    CHECK(admissible_validate(t, cfg.sequence).ok);
    auto r = rho(t, cfg.sequence);
    CHECK(is_height_function(t, r.q));
    CHECK(word_product_is_w0(t, r.word));
    auto back = rho_inverse(t, r.q, r.word);
    CHECK(std::equal(back.begin(), back.end(), cfg.sequence.begin()));
    Sequence bad = cfg.sequence;
    std::swap(bad[0], bad[1]);
    bad[0].second += 5;
    CHECK_FALSE(admissible_validate(t, bad).ok);
}

TEST_CASE("transitions") {
    FiniteType a2{'A', 2};
    auto w = parse_word("121", a2), v = parse_word("212", a2);
    // braid move (a,b,c) -> (b+c-min(a,c), min(a,c), a+b-min(a,c))
    CHECK(transition_tuple(a2, w, v, {1, 0, 0}) == LusztigTuple{0, 0, 1});
    CHECK(transition_tuple(a2, w, v, {0, 0, 1}) == LusztigTuple{1, 0, 0});
    CHECK(transition_tuple(a2, w, v, {2, 1, 3}) == LusztigTuple{2, 2, 1});
    CHECK_THROWS_AS(parse_word("1212", a2), DomainError);
    CHECK_THROWS_AS(parse_tuple("1,-1,0", 3), DomainError);
    FiniteType a3{'A', 3};
    auto x = parse_word("1,3,2,1,3,2", a3), y = parse_word("3,1,2,3,1,2", a3);
    auto path = find_move_path(a3, x, y);
    CHECK(path.size() == 2);
    CHECK(transition_along({1, 2, 3, 4, 5, 6}, path) == LusztigTuple{2, 1, 3, 5, 4, 6});
}

TEST_CASE("verify filter selection") {
    auto count = [](const std::string& f) {
        size_t k = 0;
        for (auto& c : check_registry())
            if (filter_matches(f, c.id)) ++k;
        return k;
    };
    CHECK(count("theorem-table") == 7);
    CHECK(count("sec6") == 8);
    CHECK(count("none-matching") == 0);
    CHECK(run_suite("none-matching").empty());
}

TEST_CASE("cli exit codes") {
    std::ostringstream out, err;
    CHECK(cli::run({"classify", "--family", "Dn_s1", "--n", "4", "3_0 3_4"}, out, err) == 0);
    CHECK(out.str().find("imaginary") != std::string::npos);
    std::ostringstream o2, e2;
    CHECK(cli::run({"classify", "--family", "An_s1", "--n", "2", "1_0"}, o2, e2) == 1);
    std::ostringstream o3, e3;
    CHECK(cli::run({"transition", "--type", "A2", "--from", "121", "--to", "1212", "--tuple", "0,0,1"}, o3, e3) == 1);
    std::ostringstream o4, e4;
    CHECK(cli::run({"nonsense"}, o4, e4) == 1);
}
