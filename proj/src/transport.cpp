#include "stargeo/transport.hpp"

#include <limits>

#include "stargeo/error.hpp"

namespace stargeo {

Eigen::MatrixXd cost_matrix(const std::vector<Vec>& xs, const std::vector<Vec>& ys) {
  Eigen::MatrixXd c(xs.size(), ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      if (xs[i].size() != ys[j].size()) {
        throw Error(ErrorCode::DimensionMismatch, "samples differ in dimension");
      }
      c(i, j) = (xs[i] - ys[j]).norm();
    }
  }
  return c;
}

// Shortest augmenting paths with row/column potentials (Kuhn-Munkres), O(n^3).
std::vector<std::size_t> min_cost_assignment(const Eigen::MatrixXd& cost) {
  const auto n = static_cast<std::size_t>(cost.rows());
  if (static_cast<std::size_t>(cost.cols()) != n) {
    throw Error(ErrorCode::SizeMismatch, "assignment needs a square cost matrix");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; index 0 is the virtual root column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
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
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

double w1_exact(const std::vector<Vec>& xs, const std::vector<Vec>& ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::SizeMismatch, "w1_exact needs equal sample counts");
  }
  if (xs.empty() || xs.size() > 2048) {
    throw Error(ErrorCode::InvalidArgument, "w1_exact supports 1 <= n <= 2048");
  }
  const Eigen::MatrixXd c = cost_matrix(xs, ys);
  const auto assignment = min_cost_assignment(c);
  double total = 0.0;
  for (std::size_t i = 0; i < assignment.size(); ++i) total += c(i, assignment[i]);
  return total / static_cast<double>(xs.size());
}

}  // namespace stargeo
