#pragma once

// Independent reference implementations used only by tests.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "textpecker/random.hpp"

namespace oracle {

/// Full (|a|+1) x (|b|+1) Wagner-Fischer table.
inline std::size_t levenshtein(const std::u32string& a, const std::u32string& b) {
    std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
    return d[a.size()][b.size()];
}

inline double ned(const std::u32string& a, const std::u32string& b) {
    const std::size_t m = std::max(a.size(), b.size());
    return m == 0 ? 0.0 : static_cast<double>(levenshtein(a, b)) / static_cast<double>(m);
}

struct BruteForceResult {
    double cost = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> assignment;
};

/// Enumerates every injection of the smaller side into the larger one. Costs are summed
/// in row order; the first minimum in lexicographic column-sequence order is kept.
inline BruteForceResult brute_force_assignment(const std::vector<std::vector<double>>& c) {
    BruteForceResult best;
    best.cost = std::numeric_limits<double>::infinity();
    const std::size_t m = c.size();
    const std::size_t n = m ? c[0].size() : 0;
    if (m == 0 || n == 0) {
        best.cost = 0.0;
        return best;
    }
    const std::size_t size = std::max(m, n);
    std::vector<std::size_t> perm(size);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    do {
        double total = 0.0;
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t r = 0; r < m; ++r) {
            if (perm[r] < n) {
                total += c[r][perm[r]];
                pairs.emplace_back(r, perm[r]);
            }
        }
        if (pairs.size() != std::min(m, n)) continue;
        if (total < best.cost) {
            best.cost = total;
            best.assignment = std::move(pairs);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

inline std::u32string random_string(textpecker::Rng& rng, std::size_t max_len, std::u32string_view alphabet) {
    std::u32string s(rng.index(max_len + 1), U'a');
    for (auto& ch : s) ch = alphabet[rng.index(alphabet.size())];
    return s;
}

}  // namespace oracle
