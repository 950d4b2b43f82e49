#include "catcluster/transitions.hpp"

#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace catcluster {

namespace {

bool adjacent(const FiniteType& t, int i, int j) {
    for (auto [a, b] : finite_edges(t))
        if ((a == i && b == j) || (a == j && b == i)) return true;
    return false;
}

std::string key_of(const ReducedWord& w) {
    std::string s;
    for (int x : w) s.push_back(char(x));
    return s;
}

std::vector<Move> bfs(const FiniteType& t, const ReducedWord& from, const ReducedWord& to, long long budget,
                      bool reversed) {
    if (from.size() != to.size()) throw DomainError("words have different lengths");
    if (from == to) return {};
    struct Back {
        std::string parent;
        Move move;
    };
    std::unordered_map<std::string, Back> seen;
    const std::string start = key_of(from), goal = key_of(to);
    seen.emplace(start, Back{"", {Move::Commutation, 0}});
    std::deque<ReducedWord> q{from};
    long long visited = 1;
    while (!q.empty()) {
        ReducedWord w = q.front();
        q.pop_front();
        auto nb = braid_neighbors(t, w);
        if (reversed) std::reverse(nb.begin(), nb.end());
        const std::string wk = key_of(w);
        for (auto& [v, m] : nb) {
            std::string vk = key_of(v);
            if (seen.count(vk)) continue;
            seen.emplace(vk, Back{wk, m});
            if (vk == goal) {
                std::vector<Move> path;
                for (std::string k = vk; k != start; k = seen.at(k).parent) path.push_back(seen.at(k).move);
                std::reverse(path.begin(), path.end());
                return path;
            }
            if (++visited > budget)
                throw DomainError("move search budget of " + std::to_string(budget) + " words exhausted");
            q.push_back(std::move(v));
        }
    }
    throw DomainError("target word is not reachable by braid and commutation moves");
}

}  // namespace

FiniteType parse_finite_type(const std::string& text) {
    if (text.size() < 2 || (text[0] != 'A' && text[0] != 'D' && text[0] != 'E'))
        throw DomainError("finite type must look like A3, D4 or E6, got '" + text + "'");
    FiniteType t{text[0], 0};
    try {
        size_t used = 0;
        t.n = std::stoi(text.substr(1), &used);
        if (used != text.size() - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw DomainError("bad rank in finite type '" + text + "'");
    }
    finite_edges(t);  // validates the rank
    return t;
}

ReducedWord parse_word(const std::string& text, const FiniteType& t) {
    ReducedWord w;
    if (text.find(',') != std::string::npos) {
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                w.push_back(std::stoi(tok));
            } catch (const std::exception&) {
                throw DomainError("bad letter '" + tok + "' in word");
            }
        }
    } else {
        for (char ch : text) {
            if (ch < '1' || ch > '9') throw DomainError(std::string("bad letter '") + ch + "' in word");
            w.push_back(ch - '0');
        }
    }
    for (int x : w)
        if (x < 1 || x > t.n) throw DomainError("letter " + std::to_string(x) + " is not a node of the diagram");
    if (int(w.size()) != longest_length(t))
        throw DomainError("word length " + std::to_string(w.size()) + " differs from the length of w0 (" +
                          std::to_string(longest_length(t)) + ")");
    if (!word_product_is_w0(t, w)) throw DomainError("word is not a reduced expression of w0");
    return w;
}

std::string format_word(const ReducedWord& w) {
    bool small = std::all_of(w.begin(), w.end(), [](int x) { return x < 10; });
    std::string s;
    for (size_t i = 0; i < w.size(); ++i) {
        if (!small && i) s += ",";
        s += std::to_string(w[i]);
    }
    return s;
}

LusztigTuple parse_tuple(const std::string& text, size_t length) {
    LusztigTuple c;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            size_t used = 0;
            long long v = std::stoll(tok, &used);
            if (used != tok.size()) throw std::invalid_argument("trailing");
            if (v < 0) throw DomainError("tuple entries must be nonnegative");
            c.push_back(v);
        } catch (const DomainError&) {
            throw;
        } catch (const std::exception&) {
            throw DomainError("bad tuple entry '" + tok + "'");
        }
    }
    if (c.size() != length)
        throw DomainError("tuple has " + std::to_string(c.size()) + " entries, word has " + std::to_string(length));
    return c;
}

std::string format_tuple(const LusztigTuple& c) {
    std::string s;
    for (size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i]);
    return s;
}

std::string format_move(const Move& m) {
    return std::string(m.kind == Move::Braid ? "braid@" : "commute@") + std::to_string(m.pos);
}

ReducedWord apply_move(const ReducedWord& w, const Move& m) {
    ReducedWord v = w;
    if (m.kind == Move::Commutation) {
        std::swap(v[m.pos], v[m.pos + 1]);
    } else {
        int i = w[m.pos], j = w[m.pos + 1];
        v[m.pos] = j, v[m.pos + 1] = i, v[m.pos + 2] = j;
    }
    return v;
}

std::vector<std::pair<ReducedWord, Move>> braid_neighbors(const FiniteType& t, const ReducedWord& w) {
    std::vector<std::pair<ReducedWord, Move>> out;
    for (size_t k = 0; k + 1 < w.size(); ++k) {
        int i = w[k], j = w[k + 1];
        if (i == j) continue;
        if (!adjacent(t, i, j)) {
            Move m{Move::Commutation, k};
            out.push_back({apply_move(w, m), m});
        } else if (k + 2 < w.size() && w[k + 2] == i) {
            Move m{Move::Braid, k};
            out.push_back({apply_move(w, m), m});
        }
    }
    return out;
}

std::vector<Move> find_move_path(const FiniteType& t, const ReducedWord& from, const ReducedWord& to,
                                 long long budget) {
    return bfs(t, from, to, budget, false);
}

std::vector<Move> find_move_path_reversed(const FiniteType& t, const ReducedWord& from, const ReducedWord& to,
                                          long long budget) {
    return bfs(t, from, to, budget, true);
}

LusztigTuple apply_move_tuple(const LusztigTuple& c, const Move& m) {
    LusztigTuple d = c;
    if (m.kind == Move::Commutation) {
        std::swap(d[m.pos], d[m.pos + 1]);
    } else {
        long long a = c[m.pos], b = c[m.pos + 1], e = c[m.pos + 2], mn = std::min(a, e);
        d[m.pos] = b + e - mn;
        d[m.pos + 1] = mn;
        d[m.pos + 2] = a + b - mn;
    }
    return d;
}

LusztigTuple transition_along(const LusztigTuple& c, const std::vector<Move>& path) {
    LusztigTuple d = c;
    for (auto& m : path) d = apply_move_tuple(d, m);
    return d;
}

LusztigTuple transition_tuple(const FiniteType& t, const ReducedWord& from, const ReducedWord& to,
                              const LusztigTuple& c, long long budget) {
    if (c.size() != from.size()) throw DomainError("tuple length differs from word length");
    return transition_along(c, find_move_path(t, from, to, budget));
}

}  // namespace catcluster
