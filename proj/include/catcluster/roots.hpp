#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "catcluster/arith.hpp"
#include "catcluster/cluster.hpp"

namespace catcluster {

// Coordinates a_0..a_n in the simple-root basis.
using RootVec = std::vector<long long>;

RootVec parse_rootvec(const std::string& text, size_t dim, const RootVec& delta);
std::string format_rootvec(const RootVec& v);

struct FiniteType {
    char type = 'A';  // 'A', 'D' or 'E'
    int n = 1;
};

// Edges of the finite Dynkin diagram on nodes 1..n.
std::vector<std::pair<int, int>> finite_edges(const FiniteType& t);
// Positive roots as vectors of length n+1 with a_0 = 0.
std::vector<RootVec> finite_positive_roots(const FiniteType& t);
// Word over 1..n; true iff the product of simple reflections is the longest element.
bool word_product_is_w0(const FiniteType& t, const std::vector<int>& word);
int longest_length(const FiniteType& t);
int coxeter_number(const FiniteType& t);

struct AffineSystem {
    AffineTag tag;
    std::vector<std::vector<int>> cartan;  // <h_i, alpha_j>
    RootVec delta;

    static AffineSystem make(const AffineTag& tag);
    size_t dim() const { return delta.size(); }
    FiniteType finite() const { return {tag.type, tag.n}; }
    long long pairing(int i, const RootVec& v) const;
};

RootVec simple_reflect(const AffineSystem& sys, int i, const RootVec& v);
bool is_real_root(const AffineSystem& sys, const RootVec& v);

// c = s_{i_0} ... s_{i_n}; apply() acts by the rightmost reflection first.
struct CoxeterElement {
    std::vector<int> order;
    RootVec apply(const AffineSystem& sys, const RootVec& v) const;
};

// Topological order with k < l => b_{i_k i_l} >= 0 on the principal part,
// smallest index first among the available sources.
CoxeterElement coxeter_from_matrix(const ExchangeMatrix& B);

struct OrbitResult {
    bool finite = false;
    int period = 0;  // when finite
    int cap = 0;
};
OrbitResult c_orbit_classify(const AffineSystem& sys, const CoxeterElement& c, const RootVec& beta,
                             int step_cap);
int default_orbit_cap(const AffineSystem& sys);

// Three components of the finite-orbit set, in the standard labeling.
std::vector<std::vector<RootVec>> lambda_components(const AffineTag& tag);

struct PhiC {
    bool is_delta = false;
    RootVec root;  // empty when is_delta
    static PhiC delta() { return {true, {}}; }
    static PhiC real(RootVec r) { return {false, std::move(r)}; }
    bool operator==(const PhiC& o) const { return is_delta == o.is_delta && root == o.root; }
    bool operator<(const PhiC& o) const { return std::tie(is_delta, root) < std::tie(o.is_delta, o.root); }
};

struct Expansion {
    long long delta = 0;
    std::map<RootVec, long long> real;
    bool operator==(const Expansion& o) const { return delta == o.delta && real == o.real; }
    bool operator<(const Expansion& o) const { return std::tie(delta, real) < std::tie(o.delta, o.real); }
    RootVec sum(const RootVec& delta_vec) const;
};

struct RealExpansion {
    // Mutations (standard node indices) from the initial seed to the certifying cluster.
    std::vector<int> word;
    // Member d-vectors of that cluster with positive coefficient.
    std::map<RootVec, long long> coeffs;
};

// Everything the fan walk needs: the affine system, an acyclic principal
// matrix indexed by standard node labels, and caches.
class FanContext {
public:
    FanContext(AffineSystem sys, ExchangeMatrix principal);

    const AffineSystem& sys() const { return sys_; }
    const ExchangeMatrix& matrix() const { return B_; }
    const CoxeterElement& coxeter() const { return c_; }
    const std::vector<std::vector<RootVec>>& lambda() const { return lambda_; }
    bool in_lambda(const RootVec& v) const;
    // Membership in Phi_c^re: -Pi, positive real roots of infinite orbit, Lambda.
    bool in_phi_c_re(const RootVec& v) const;
    // Defect with respect to the Euler form of the initial seed.
    long long defect(const RootVec& v) const;

    long long budget_for(const RootVec& gamma) const;
    // Replaces the default and environment budgets; clears cached walk results.
    void set_budget_override(std::optional<long long> b);

    std::optional<RealExpansion> real_expansion(const RootVec& gamma) const;
    bool compatible(const PhiC& a, const PhiC& b) const;
    Expansion cluster_expansion(const RootVec& gamma) const;
    std::vector<Expansion> brute_force_oracle(const RootVec& gamma, int box) const;

    // Candidate set used by the oracle: -Pi, positive real roots and Lambda inside the box.
    std::vector<RootVec> candidates(int box) const;

private:
    AffineSystem sys_;
    ExchangeMatrix B_;
    CoxeterElement c_;
    std::vector<std::vector<RootVec>> lambda_;
    std::optional<long long> budget_override_;
    mutable std::map<std::pair<RootVec, RootVec>, bool> compat_cache_;
    mutable std::map<RootVec, std::optional<RealExpansion>> real_cache_;
    mutable std::map<int, std::vector<RootVec>> cand_cache_;
    mutable std::map<int, std::vector<std::vector<bool>>> oracle_compat_;

    std::optional<RealExpansion> ray_walk(const RootVec& gamma, bool same_side, long long budget) const;
    std::optional<RealExpansion> greedy_walk(const RootVec& gamma, long long budget) const;
    bool real_compatible(const RootVec& a, const RootVec& b) const;
    std::vector<Expansion> imaginary_candidates(const RootVec& gamma) const;
};

std::string expansion_json(const Expansion& e);

}  // namespace catcluster
