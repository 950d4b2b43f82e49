#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "catcluster/categorification.hpp"

namespace catcluster {

struct CheckResult {
    std::string id;
    int criterion = 0;
    bool pass = false;
    double elapsed = 0;          // seconds
    std::string counterexample;  // empty iff pass
};

struct CheckOptions {
    uint64_t rng_seed = 0;
    std::optional<long long> budget;  // fan-walk budget override
};

struct CheckInfo {
    std::string id;
    int criterion;
    // Returns the empty string on success, otherwise a counterexample.
    std::function<std::string(const CheckOptions&)> run;
};

const std::vector<CheckInfo>& check_registry();
// Shell glob on the id; a bare group name such as "sec6" also selects "sec6/...".
bool filter_matches(const std::string& filter, const std::string& id);
std::vector<CheckResult> run_suite(const std::string& filter, const CheckOptions& opts = {});

// Breadth-first walk over labeled seeds of a family.
struct ExploreReport {
    size_t seeds = 0;
    size_t variables = 0;
    size_t label_checks = 0;
    size_t disambiguated = 0;  // both exchange candidates were genuine monomials
    std::string failure;       // first counterexample, empty when clean
};
struct ExploreOptions {
    int depth = 6;
    bool check_labels = true;       // G(label) equals the Laurent d-vector
    bool check_positivity = false;  // every Laurent coefficient nonnegative
    bool check_tropical = false;    // tropical d-vector recursion matches the Laurent d-vectors
};
ExploreReport explore_labeled_seeds(const FamilyContext& ctx, const ExploreOptions& opt);

// Closed forms of the monomial attached to the null root.
Monomial delta_closed_form(const FamilyKey& key);

}  // namespace catcluster
