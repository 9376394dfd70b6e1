#pragma once

#include <vector>

#include "stargeo/spherequad.hpp"

namespace stargeo {

/// Pairwise Euclidean distances, rows indexed by xs.
Eigen::MatrixXd cost_matrix(const std::vector<Vec>& xs, const std::vector<Vec>& ys);

/// Optimal assignment for a square cost matrix; entry i is the column
/// matched to row i.
std::vector<std::size_t> min_cost_assignment(const Eigen::MatrixXd& cost);

/// 1-Wasserstein distance between two uniform empirical measures of equal
/// size n (1 <= n <= 2048), computed as a minimum-cost perfect matching.
double w1_exact(const std::vector<Vec>& xs, const std::vector<Vec>& ys);

}  // namespace stargeo
