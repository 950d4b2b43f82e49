#include "catcluster/arith.hpp"

#include <cstdlib>
#include <utility>

namespace catcluster {

bool solve_rational(const std::vector<std::vector<Rat>>& M, const std::vector<Rat>& b,
                    std::vector<Rat>& x) {
    const size_t n = M.size();
    std::vector<std::vector<Rat>> A(n);
    for (size_t i = 0; i < n; ++i) {
        A[i] = M[i];
        A[i].push_back(b[i]);
    }
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && A[piv][col] == 0) ++piv;
        if (piv == n) return false;
        std::swap(A[piv], A[col]);
        for (size_t r = 0; r < n; ++r) {
            if (r == col || A[r][col] == 0) continue;
            Rat f = A[r][col] / A[col][col];
            for (size_t c = col; c <= n; ++c) A[r][c] -= f * A[col][c];
        }
    }
    x.assign(n, Rat(0));
    for (size_t i = 0; i < n; ++i) x[i] = A[i][n] / A[i][i];
    return true;
}

long long env_budget(long long fallback) {
    const char* s = std::getenv("CATCLUSTER_BUDGET");
    if (!s || !*s) return fallback;
    char* end = nullptr;
    long long v = std::strtoll(s, &end, 10);
    if (end == s || *end != '\0' || v <= 0) return fallback;
    return v;
}

}  // namespace catcluster
