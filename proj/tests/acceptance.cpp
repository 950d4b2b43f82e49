// One line per acceptance criterion; exit status 1 if any criterion fails.
#include <cstdio>
#include <map>
#include <string>

#include "catcluster/verify.hpp"

using namespace catcluster;

int main() {
    // Wall-clock limits in seconds; 0 means none.
    const std::map<int, std::pair<const char*, double>> crit = {
        {1, {"theorem table reproduction", 10}},
        {2, {"transition identities", 1}},
        {3, {"G inverse of delta closed forms", 1}},
        {4, {"G equals d on labeled seeds to depth 6", 300}},
        {5, {"expansion uniqueness vs brute-force oracle", 600}},
        {6, {"classification spot checks", 60}},
        {7, {"finite-orbit set validation", 300}},
        {8, {"property suites", 0}},
    };
    auto results = run_suite("*");
    bool all = true;
    for (auto& [c, info] : crit) {
        size_t total = 0, failed = 0;
        double elapsed = 0;
        std::string first;
        for (auto& r : results) {
            if (r.criterion != c) continue;
            ++total;
            elapsed += r.elapsed;
            if (!r.pass) {
                ++failed;
                if (first.empty()) first = r.id + ": " + r.counterexample;
            }
        }
        bool slow = info.second > 0 && elapsed > info.second;
        bool ok = total > 0 && failed == 0 && !slow;
        all = all && ok;
        std::printf("%s criterion %d (%s): %zu/%zu checks, %.2fs%s%s%s\n", ok ? "PASS" : "FAIL", c, info.first,
                    total - failed, total, elapsed, slow ? " over limit" : "", first.empty() ? "" : " first failure ",
                    first.c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
