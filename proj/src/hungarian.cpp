#include "textpecker/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "textpecker/error.hpp"

namespace textpecker {

CostMatrix::CostMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw ContractError("CostMatrix: ragged rows");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

double assignment_cost(const CostMatrix& costs, const Assignment& assignment) {
    double total = 0.0;
    for (const auto& [r, c] : assignment) total += costs(r, c);
    return total;
}

namespace {

// Square problem padded with zero-cost dummy rows/columns.
class SquareSolver {
public:
    explicit SquareSolver(const CostMatrix& costs)
        : real_rows_(costs.rows()), real_cols_(costs.cols()), n_(std::max(costs.rows(), costs.cols())),
          cost_(n_ * n_, 0.0) {
        double largest = 0.0;
        for (std::size_t r = 0; r < real_rows_; ++r) {
            for (std::size_t c = 0; c < real_cols_; ++c) {
                const double v = costs(r, c);
                if (!std::isfinite(v) || v < 0.0)
                    throw ContractError("hungarian_match: costs must be finite and non-negative");
                cost_[r * n_ + c] = v;
                largest = std::max(largest, v);
            }
        }
        eps_ = 1e-9 * std::max(1.0, largest);
    }

    Assignment solve() {
        optimize();
        make_lexicographic();
        Assignment out;
        for (std::size_t r = 0; r < real_rows_; ++r) {
            const std::size_t c = row_to_col_[r];
            if (c < real_cols_) out.emplace_back(r, c);
        }
        return out;
    }

private:
    double at(std::size_t r, std::size_t c) const { return cost_[r * n_ + c]; }

    bool tight(std::size_t r, std::size_t c) const { return at(r, c) - row_pot_[r] - col_pot_[c] <= eps_; }

    // Shortest augmenting path Hungarian method, O(n^3). Potentials stay dual-feasible,
    // so every optimal assignment uses tight edges only.
    void optimize() {
        constexpr double kInf = std::numeric_limits<double>::infinity();
        const std::size_t n = n_;
        std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
        std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);
        std::vector<double> minv(n + 1);
        std::vector<char> used(n + 1);
        for (std::size_t i = 1; i <= n; ++i) {
            owner[0] = i;
            std::size_t j0 = 0;
            std::fill(minv.begin(), minv.end(), kInf);
            std::fill(used.begin(), used.end(), 0);
            do {
                used[j0] = 1;
                const std::size_t i0 = owner[j0];
                double delta = kInf;
                std::size_t j1 = 0;
                for (std::size_t j = 1; j <= n; ++j) {
                    if (used[j]) continue;
                    const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
                    if (cur < minv[j]) {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if (minv[j] < delta) {
                        delta = minv[j];
                        j1 = j;
                    }
                }
                for (std::size_t j = 0; j <= n; ++j) {
                    if (used[j]) {
                        u[owner[j]] += delta;
                        v[j] -= delta;
                    } else {
                        minv[j] -= delta;
                    }
                }
                j0 = j1;
            } while (owner[j0] != 0);
            do {
                const std::size_t j1 = way[j0];
                owner[j0] = owner[j1];
                j0 = j1;
            } while (j0 != 0);
        }
        row_pot_.assign(u.begin() + 1, u.end());
        col_pot_.assign(v.begin() + 1, v.end());
        row_to_col_.assign(n, 0);
        col_to_row_.assign(n, 0);
        for (std::size_t j = 1; j <= n; ++j) {
            row_to_col_[owner[j] - 1] = j - 1;
            col_to_row_[j - 1] = owner[j] - 1;
        }
    }

    // Walks rows in order and gives each the smallest tight column that still admits a
    // perfect tight matching for the rows after it, by rotating alternating cycles.
    void make_lexicographic() {
        std::vector<std::size_t> parent_col(n_);
        std::vector<char> seen(n_);
        std::vector<std::size_t> queue;
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t home = row_to_col_[i];
            for (std::size_t c = 0; c < home; ++c) {
                if (!tight(i, c)) continue;
                const std::size_t start = col_to_row_[c];
                if (start < i) continue;  // column held by a fixed row

                // BFS over rows > i: from a row, step through a tight column to its owner,
                // until the column `home` (owned by i) is reached.
                std::fill(seen.begin(), seen.end(), 0);
                queue.assign(1, start);
                seen[c] = 1;
                parent_col[c] = n_;
                std::size_t found = n_;
                for (std::size_t q = 0; q < queue.size() && found == n_; ++q) {
                    const std::size_t r = queue[q];
                    for (std::size_t k = 0; k < n_; ++k) {
                        if (seen[k] || !tight(r, k)) continue;
                        const std::size_t holder = col_to_row_[k];
                        if (holder < i) continue;
                        seen[k] = 1;
                        parent_col[k] = row_to_col_[r];
                        if (k == home) {
                            found = k;
                            break;
                        }
                        queue.push_back(holder);
                    }
                }
                if (found == n_) continue;

                // Rotate: each row on the path takes the column found after it.
                std::size_t k = home;
                while (k != c) {
                    const std::size_t prev = parent_col[k];
                    const std::size_t r = col_to_row_[prev];
                    row_to_col_[r] = k;
                    col_to_row_[k] = r;
                    k = prev;
                }
                row_to_col_[i] = c;
                col_to_row_[c] = i;
                break;
            }
        }
    }

    std::size_t real_rows_;
    std::size_t real_cols_;
    std::size_t n_;
    std::vector<double> cost_;
    double eps_ = 0.0;
    std::vector<double> row_pot_, col_pot_;
    std::vector<std::size_t> row_to_col_, col_to_row_;
};

}  // namespace

Assignment hungarian_match(const CostMatrix& costs) {
    if (costs.empty()) return {};
    return SquareSolver(costs).solve();
}

}  // namespace textpecker
