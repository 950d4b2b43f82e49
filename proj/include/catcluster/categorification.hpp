#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "catcluster/cluster.hpp"
#include "catcluster/monomial.hpp"
#include "catcluster/roots.hpp"

namespace catcluster {

// ---- admissible sequences and Q-data ----

// Entry k of a sequence is the letter (iota_k, p_k); positions are 1-based.
using Sequence = std::vector<Letter>;

// Continue a defining window periodically: s_{k+l} = (iota_k^*, p_k + h).
Sequence extend_sequence(const FiniteType& t, const Sequence& window, size_t length);
int star_involution(const FiniteType& t, int i);

struct AdmissibleReport {
    bool ok = true;
    size_t index = 0;    // 1-based position of the first failure
    int condition = 0;   // 1, 2 or 3
    std::string message;
};
// Checks conditions (1) and (2) on positions whose successor lies inside the
// sequence and condition (3) on every full length-l window.
AdmissibleReport admissible_validate(const FiniteType& t, const Sequence& seq);

struct QDatum {
    std::vector<int> xi;  // xi[i] for nodes 1..n, xi[0] unused
    bool operator==(const QDatum& o) const { return xi == o.xi; }
};
bool is_height_function(const FiniteType& t, const QDatum& q);
bool is_sink(const FiniteType& t, const QDatum& q, int i);

struct RhoResult {
    QDatum q;
    std::vector<int> word;
};
// Uses the first l entries of seq.
RhoResult rho(const FiniteType& t, const Sequence& seq);
Sequence rho_inverse(const FiniteType& t, const QDatum& q, const std::vector<int>& word);

// ---- GLS quiver and KKOP seed ----

// Successor / predecessor positions in an explicit finite sequence; 0 when absent.
size_t seq_plus(const Sequence& s, size_t k);
size_t seq_minus(const Sequence& s, size_t k);

Quiver gls_quiver(const FiniteType& t, const Sequence& s, size_t a, size_t b);
// Nodes are the positions a..b (ids are their decimal strings); labels are KR monomials.
Seed kkop_initial_seed(const FiniteType& t, const Sequence& s, size_t a, size_t b);

// ---- families ----

enum class FamilyKind { Dn_s1, D4_s2, En_s1, An_s1 };

struct FamilyKey {
    FamilyKind kind = FamilyKind::Dn_s1;
    int n = 4;
    std::string name() const;  // e.g. "Dn_s1(n=5)"
    std::string tag() const;   // "Dn_s1" etc.
};
FamilyKey parse_family(const std::string& tag, int n);
// All twelve rows of the categorification table, in the order listed there.
std::vector<FamilyKey> theorem_table_keys();

struct PlainNode {
    int node;
    Letter neg, pos;  // contribute -alpha_node and +alpha_node
};
// Distinguished node: letters v0, v1, v2 and the two root coordinates (x, y)
// read by the region tables.
struct Block {
    int node;
    Letter v0, v1, v2;
    int x, y;
};

struct FamilyConfig {
    FamilyKey key;
    FiniteType fin;
    size_t a = 1, b = 1;
    Sequence window;    // one period
    Sequence sequence;  // extended far enough for the interval
    AffineTag target;   // type reached by the theorem mutation order
    bool has_g = false;
    int label_shift = 0;  // spectral shift from theorem labels to the G alphabet
    std::vector<PlainNode> plain;
    std::vector<Block> blocks;
    std::vector<std::pair<int, int>> edges;  // affine diagram in family labels
    std::vector<int> to_standard;            // family node label -> standard label
    std::set<Letter> alphabet;

    size_t dim() const { return to_standard.size(); }
    std::vector<int> neighbors(int v) const;
    // F_i for every finite node that carries a plain part or a block.
    std::vector<std::pair<int, Monomial>> frozen_monomials() const;
};

FamilyConfig make_family(const FamilyKey& key);

// Labels of the circled nodes in mutation order.
std::vector<Monomial> theorem_mutation_labels(const FamilyKey& key);
// 1-based positions of those nodes in the KKOP seed.
std::vector<size_t> theorem_mutation_positions(const FamilyConfig& cfg, const Seed& kkop);

struct TheoremResult {
    Seed seed;                         // labels present only when every step was unambiguous
    std::vector<std::optional<Monomial>> labels;  // per node, nullopt when undetermined
    std::vector<size_t> positions;
    std::optional<AffineDetection> detected;
};
// Throws InvariantError when the final principal quiver is not of the target type.
TheoremResult theorem_mutation_sequence(const FamilyKey& key);

// ---- monomial labels under mutation ----

struct LabelCandidates {
    Monomial up, down;  // prod_{b_ik>0} m_i^{b_ik} / m_k and prod_{b_ik<0} m_i^{-b_ik} / m_k
    bool up_ok = false, down_ok = false;
};
LabelCandidates label_candidates(const ExchangeMatrix& B, const std::vector<Monomial>& labels, size_t k);

// The chooser is consulted only when both candidates are genuine monomials.
using LabelChooser = std::function<std::optional<Monomial>(const LabelCandidates&)>;
Seed monomial_seed_mutate(const Seed& S, size_t k, const LabelChooser& choose = nullptr);

// ---- canonical form and G ----

struct PlainPart {
    int node;
    long long p = 0, q = 0;  // exponents of neg and pos letters
};
struct BlockPart {
    int node;
    // (v1v2)^p (v0v2)^q (v0v1)^r v0^s v1^t v2^u
    long long p = 0, q = 0, r = 0, s = 0, t = 0, u = 0;
};
struct CanonicalForm {
    std::vector<std::pair<int, long long>> frozen;  // (node, a_i)
    std::vector<PlainPart> plain;
    std::vector<BlockPart> blocks;
    bool constraints_hold() const;
};

CanonicalForm canonical_form(const Monomial& m, const FamilyConfig& cfg);
Monomial reconstruct(const CanonicalForm& c, const FamilyConfig& cfg);
// G in family labels.
RootVec G(const Monomial& m, const FamilyConfig& cfg);
std::pair<std::vector<std::pair<int, long long>>, Monomial> strip_frozen(const Monomial& m, const FamilyConfig& cfg);

// Region tables.  Letters 'A'..'F'; region_of picks the first matching region.
char region_of(long long X, long long Y);
bool region_closure_contains(char region, long long X, long long Y);
Monomial region_monomial(char region, const Block& blk, long long X, long long Y);
Monomial G_inverse(const RootVec& gamma, const FamilyConfig& cfg);

RootVec family_to_standard(const RootVec& v, const FamilyConfig& cfg);
RootVec standard_to_family(const RootVec& v, const FamilyConfig& cfg);

// ---- the post-mutation seed used as initial seed for G families ----

struct FamilyContext {
    FamilyConfig cfg;
    Seed seed;                      // theorem seed, labels shifted into the G alphabet
    std::vector<int> root_of;       // family root label per node, -1 on frozen nodes
    std::vector<int> frozen_of;     // finite node i with label F_i, -1 on exchangeable nodes
    std::shared_ptr<FanContext> fan;  // standard labeling

    // Family root coordinates of the Laurent d-vector of y.
    RootVec d_vector(const LaurentPoly& y) const;
    // Standard-label principal matrix of a seed with the same node set.
    ExchangeMatrix standard_principal(const ExchangeMatrix& B) const;
};

// Throws DomainError for families without G maps (A_2, A_3, A_4).
std::shared_ptr<const FamilyContext> family_context(const FamilyKey& key);
// Context for `--type D<n>_1 / E<n>_1` root computations: the matching s^1 family.
std::shared_ptr<const FamilyContext> family_context_for_type(const AffineTag& tag);

// ---- classification and factorization ----

struct Factor {
    enum Kind { Frozen, Real, Delta } kind;
    int node = -1;                 // Frozen
    RootVec root;                  // Real (standard labels)
    long long mult = 0;
    Monomial monomial;             // the factor's own monomial, including the multiplicity
};

struct Classification {
    bool real = false;
    long long m_delta = 0;
    RootVec gamma;        // G(m), standard labels
    RootVec gamma_family; // G(m), family labels
    std::vector<int> certificate;
    Monomial cluster_monomial;  // real only: the cluster monomial the certificate names
    Expansion expansion;
    std::vector<Factor> factors;
};

void check_alphabet(const Monomial& m, const FamilyConfig& cfg);
Classification classify(const Monomial& m, const FamilyContext& ctx);
std::vector<Factor> factorize(const Monomial& m, const FamilyContext& ctx);
// Replays a fan-walk certificate on the labeled initial seed and returns the
// cluster monomial it names (frozen part excluded).
Monomial certificate_monomial(const FamilyContext& ctx, const RealExpansion& cert);

}  // namespace catcluster
