#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "stargeo/error.hpp"
#include "stargeo/transport.hpp"

using namespace stargeo;

namespace {

std::vector<Vec> random_points(std::size_t n, std::mt19937_64& rng, double shift = 0.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vec> out;
  for (std::size_t i = 0; i < n; ++i) {
    Vec v(2);
    v << g(rng) + shift, g(rng);
    out.push_back(v);
  }
  return out;
}

double brute_force(const std::vector<Vec>& xs, const std::vector<Vec>& ys) {
  std::vector<std::size_t> perm(xs.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) c += (xs[i] - ys[perm[i]]).norm();
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(xs.size());
}

TEST(Transport, Examples) {
  std::mt19937_64 rng(1);
  const auto xs = random_points(10, rng);
  EXPECT_NEAR(w1_exact(xs, xs), 0.0, 1e-15);
  Vec a(2), b(2);
  a << 0.0, 0.0;
  b << 3.0, 4.0;
  EXPECT_NEAR(w1_exact({a}, {b}), 5.0, 1e-15);
}

TEST(Transport, MatchesBruteForce) {
  std::mt19937_64 rng(2);
  for (std::size_t n = 1; n <= 6; ++n) {
    for (int t = 0; t < 20; ++t) {
      const auto xs = random_points(n, rng);
      const auto ys = random_points(n, rng, 0.5);
      EXPECT_NEAR(w1_exact(xs, ys), brute_force(xs, ys), 1e-12);
    }
  }
}

TEST(Transport, AssignmentIsPermutation) {
  std::mt19937_64 rng(3);
  const auto xs = random_points(50, rng);
  const auto ys = random_points(50, rng);
  auto a = min_cost_assignment(cost_matrix(xs, ys));
  std::sort(a.begin(), a.end());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], i);
}

TEST(Transport, SymmetryShiftAndScale) {
  std::mt19937_64 rng(4);
  const auto xs = random_points(64, rng);
  const auto ys = random_points(64, rng, 1.0);
  const double w = w1_exact(xs, ys);
  EXPECT_NEAR(w1_exact(ys, xs), w, 1e-10);
  Vec s(2);
  s << -3.0, 7.5;
  std::vector<Vec> xs2, ys2, xs3, ys3;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs2.push_back(xs[i] + s);
    ys2.push_back(ys[i] + s);
    xs3.push_back(2.5 * xs[i]);
    ys3.push_back(2.5 * ys[i]);
  }
  EXPECT_NEAR(w1_exact(xs2, ys2), w, 1e-10);
  EXPECT_NEAR(w1_exact(xs3, ys3), 2.5 * w, 1e-10);
}

TEST(Transport, CostMatrixZeroDiagonal) {
  std::mt19937_64 rng(5);
  const auto xs = random_points(8, rng);
  const Eigen::MatrixXd c = cost_matrix(xs, xs);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(c(i, i), 0.0);
  EXPECT_TRUE(c.isApprox(c.transpose()));
}

TEST(Transport, SizeErrors) {
  std::mt19937_64 rng(6);
  try {
    w1_exact(random_points(3, rng), random_points(4, rng));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SizeMismatch);
  }
  EXPECT_THROW(w1_exact({}, {}), Error);
}

}  // namespace
