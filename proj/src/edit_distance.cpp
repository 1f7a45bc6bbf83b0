#include "textpecker/edit_distance.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "textpecker/utf8.hpp"

namespace textpecker {

namespace {

template <typename Cell>
std::size_t single_row(std::u32string_view a, std::u32string_view b, Cell* row) {
    std::iota(row, row + b.size() + 1, Cell{0});
    for (std::size_t i = 0; i < a.size(); ++i) {
        Cell diag = row[0];
        row[0] = static_cast<Cell>(i + 1);
        const char32_t ca = a[i];
        for (std::size_t j = 0; j < b.size(); ++j) {
            const Cell up = row[j + 1];
            const Cell sub = diag + (ca == b[j] ? 0 : 1);
            row[j + 1] = std::min({static_cast<Cell>(up + 1), static_cast<Cell>(row[j] + 1), sub});
            diag = up;
        }
    }
    return row[b.size()];
}

}  // namespace

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
    // Common prefix and suffix never change the distance.
    while (!a.empty() && !b.empty() && a.front() == b.front()) a.remove_prefix(1), b.remove_prefix(1);
    while (!a.empty() && !b.empty() && a.back() == b.back()) a.remove_suffix(1), b.remove_suffix(1);
    if (a.size() < b.size()) std::swap(a, b);
    if (b.empty()) return a.size();

    // Single row over the shorter string.
    constexpr std::size_t kStack = 128;
    if (b.size() < kStack && a.size() < UINT32_MAX) {
        std::uint32_t row[kStack];
        return single_row(a, b, row);
    }
    std::vector<std::size_t> row(b.size() + 1);
    return single_row(a, b, row.data());
}

double ned(std::u32string_view a, std::u32string_view b) {
    const std::size_t longest = std::max(a.size(), b.size());
    if (longest == 0) return 0.0;
    return static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

double ned(std::string_view a, std::string_view b) { return ned(utf8::decode(a), utf8::decode(b)); }

}  // namespace textpecker
