#pragma once

#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

namespace textpecker {

/// Dense row-major cost matrix.
class CostMatrix {
public:
    CostMatrix() = default;
    CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    CostMatrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

using Assignment = std::vector<std::pair<std::size_t, std::size_t>>;

/// Minimum-cost assignment of cardinality min(rows, cols), sorted by row.
///
/// Among optimal assignments the one whose column sequence (rows in order, with
/// unmatched rows ranking after every real column) is lexicographically smallest is
/// returned. Costs must be finite and non-negative; throws ContractError otherwise.
Assignment hungarian_match(const CostMatrix& costs);

double assignment_cost(const CostMatrix& costs, const Assignment& assignment);

}  // namespace textpecker
