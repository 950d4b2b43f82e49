#pragma once

#include <optional>
#include <string>
#include <vector>

#include "catcluster/roots.hpp"

namespace catcluster {

using ReducedWord = std::vector<int>;
using LusztigTuple = std::vector<long long>;

// Accepts "312431243124" or "3,1,2,4,...". Validates against w0 of t.
ReducedWord parse_word(const std::string& text, const FiniteType& t);
std::string format_word(const ReducedWord& w);
FiniteType parse_finite_type(const std::string& text);  // "D4", "A3", "E6"

LusztigTuple parse_tuple(const std::string& text, size_t length);
std::string format_tuple(const LusztigTuple& c);

struct Move {
    enum Kind { Commutation, Braid } kind;
    size_t pos;  // 0-based index of the first affected letter
    bool operator==(const Move& o) const { return kind == o.kind && pos == o.pos; }
};
std::string format_move(const Move& m);

ReducedWord apply_move(const ReducedWord& w, const Move& m);
std::vector<std::pair<ReducedWord, Move>> braid_neighbors(const FiniteType& t, const ReducedWord& w);

constexpr long long default_move_budget = 1000000;
// Breadth-first; neighbors are explored in braid_neighbors order.  Throws
// DomainError when the budget of visited words is exhausted.
std::vector<Move> find_move_path(const FiniteType& t, const ReducedWord& from, const ReducedWord& to,
                                 long long budget = default_move_budget);

// Same search with the neighbor order reversed; gives a second, usually different path.
std::vector<Move> find_move_path_reversed(const FiniteType& t, const ReducedWord& from, const ReducedWord& to,
                                          long long budget = default_move_budget);

LusztigTuple apply_move_tuple(const LusztigTuple& c, const Move& m);
LusztigTuple transition_along(const LusztigTuple& c, const std::vector<Move>& path);
LusztigTuple transition_tuple(const FiniteType& t, const ReducedWord& from, const ReducedWord& to,
                              const LusztigTuple& c, long long budget = default_move_budget);

}  // namespace catcluster
