#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "catcluster/laurent.hpp"
#include "catcluster/monomial.hpp"

namespace catcluster {

// Exchange matrix on an ordered node set K.  Stored as a full square; entries
// between two frozen nodes are always zero.
struct ExchangeMatrix {
    std::vector<std::string> ids;
    std::vector<bool> frozen;
    std::vector<std::vector<int>> b;

    size_t size() const { return ids.size(); }
    int operator()(size_t i, size_t j) const { return b[i][j]; }
    std::vector<size_t> exchangeable() const;
    std::vector<size_t> frozen_nodes() const;
    size_t index_of(const std::string& id) const;
    // Throws DomainError unless the principal part is skew-symmetric, frozen
    // entries are consistent (b_ij = -b_ji), and frozen-frozen entries vanish.
    void validate() const;
    bool operator==(const ExchangeMatrix& o) const { return ids == o.ids && frozen == o.frozen && b == o.b; }
};

ExchangeMatrix matrix_mutate(const ExchangeMatrix& B, size_t k);

struct Arrow {
    size_t from, to;
    int mult;
};

struct Quiver {
    std::vector<std::string> ids;
    std::vector<bool> frozen;
    std::vector<Arrow> arrows;
};

// b_ij = #(i->j) - #(j->i).  Rejects loops and 2-cycles; frozen-frozen arrows are dropped.
ExchangeMatrix quiver_to_matrix(const Quiver& q);
Quiver matrix_to_quiver(const ExchangeMatrix& B);
bool principal_acyclic(const ExchangeMatrix& B);

struct Seed {
    ExchangeMatrix matrix;
    // One Laurent polynomial per node, in the variables x_v (v = node index).
    // Empty when the seed carries no Laurent data.
    std::vector<std::shared_ptr<const LaurentPoly>> vars;
    std::optional<std::vector<Monomial>> labels;
};

// Seed whose cluster is the node variables themselves.
Seed initial_seed(const ExchangeMatrix& B, std::optional<std::vector<Monomial>> labels = std::nullopt);
// Exchange relation with exact Laurent division; labels are dropped.
Seed seed_mutate(const Seed& S, size_t k);
// The two monomial terms of the exchange relation at k (before dividing by vars[k]).
LaurentPoly exchange_numerator(const Seed& S, size_t k);

// d-vector of y relative to the listed exchangeable variables: d_i = -min exponent of x_{ex[i]}.
std::vector<int> d_vector_of(const LaurentPoly& y, const std::vector<size_t>& ex);

// Rows indexed by exchangeable position, columns likewise.
using DVectorTuple = std::vector<std::vector<int>>;
DVectorTuple initial_d_tuple(size_t rank);
// k is an exchangeable position (index into B.exchangeable()).
DVectorTuple d_tuple_mutate(const DVectorTuple& D, const ExchangeMatrix& B, size_t kpos);

struct AffineTag {
    char type = 0;  // 'D' or 'E'
    int n = 0;
    std::string name() const;  // e.g. "D4_1"
    bool operator==(const AffineTag& o) const { return type == o.type && n == o.n; }
};

struct AffineDetection {
    AffineTag tag;
    // canonical node label (0..n) of each exchangeable position
    std::vector<int> canonical;
};

// Edges of the affine Dynkin diagram in the standard labeling.
std::vector<std::pair<int, int>> affine_edges(const AffineTag& t);
std::optional<AffineDetection> detect_affine_type(const ExchangeMatrix& B);

// Text format: `node <id> [frozen] [label=<monomial>]` and `<i> -> <j> [xN]`,
// '#' starts a comment.
struct SeedFile {
    ExchangeMatrix matrix;
    std::optional<std::vector<Monomial>> labels;
};
SeedFile parse_seed_text(const std::string& text);
std::string serialize_seed(const ExchangeMatrix& B, const std::optional<std::vector<Monomial>>& labels);

// Interns cluster variables reached from an initial seed.  Each new variable
// is computed once by exact division; later arrivals are recognised by their
// values modulo 2^61-1 at two random points, and every exact result is
// cross-checked against its predicted fingerprint.
class ClusterVarTable {
public:
    ClusterVarTable(size_t nvars, uint64_t rng_seed);
    size_t nvars() const { return n_; }
    // index of the initial variable x_v
    size_t initial(size_t v) const { return v; }
    const LaurentPoly& poly(size_t id) const { return *polys_[id]; }
    std::shared_ptr<const LaurentPoly> shared(size_t id) const { return polys_[id]; }
    size_t count() const { return polys_.size(); }
    size_t exact_divisions() const { return divisions_; }
    // Mutate the cluster `ids` (node -> variable id) at k under matrix B; returns the new id.
    size_t mutate(const ExchangeMatrix& B, const std::vector<size_t>& ids, size_t k);

private:
    size_t n_;
    std::vector<std::vector<uint64_t>> pts_, inv_;
    std::vector<std::shared_ptr<const LaurentPoly>> polys_;
    std::vector<std::array<uint64_t, 2>> fp_;
    std::map<std::array<uint64_t, 2>, size_t> index_;
    size_t divisions_ = 0;
    size_t add(LaurentPoly p);
};

}  // namespace catcluster
