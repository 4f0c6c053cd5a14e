#include "nasela/sampling.hpp"

#include "nasela/errors.hpp"
#include "nasela/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nasela {

Matrix lhs_continuous(const DoePlan& plan) {
  if (plan.n < 1) throw InvalidArgument("LHS needs n >= 1");
  const auto n = static_cast<Eigen::Index>(plan.n);
  const auto d = static_cast<Eigen::Index>(plan.space.size());
  Matrix out(n, d);
  Rng rng(plan.seed);
  std::vector<Eigen::Index> strata(plan.n);
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto& p = plan.space[static_cast<std::size_t>(j)];
    std::iota(strata.begin(), strata.end(), Eigen::Index{0});
    rng.shuffle(std::span(strata));
    const double width = (p.hi - p.lo) / static_cast<double>(plan.n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = rng.uniform_open();
      const double x = p.lo + (static_cast<double>(strata[static_cast<std::size_t>(i)]) + u) * width;
      out(i, j) = std::min(x, p.hi);
    }
  }
  return out;
}

Matrix lhs_sample(const DoePlan& plan) {
  return round_integers(lhs_continuous(plan), plan.space);
}

bool check_stratification(const Matrix& continuous, const DesignSpace& space) {
  if (static_cast<std::size_t>(continuous.cols()) != space.size()) return false;
  const Eigen::Index n = continuous.rows();
  std::vector<int> counts(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < continuous.cols(); ++j) {
    const auto& p = space[static_cast<std::size_t>(j)];
    std::fill(counts.begin(), counts.end(), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = continuous(i, j);
      if (!(x > p.lo && x <= p.hi)) return false;
      // Strata are (lo + s*w, lo + (s+1)*w].
      const double pos = (x - p.lo) / (p.hi - p.lo) * static_cast<double>(n);
      auto s = static_cast<Eigen::Index>(std::ceil(pos)) - 1;
      s = std::clamp<Eigen::Index>(s, 0, n - 1);
      ++counts[static_cast<std::size_t>(s)];
    }
    if (std::any_of(counts.begin(), counts.end(), [](int c) { return c != 1; })) return false;
  }
  return true;
}

std::vector<Eigen::Index> bootstrap_replicate(std::size_t n, const BootstrapPlan& plan,
                                              std::size_t repetition) {
  if (plan.subsample_size < 1 || plan.repetitions < 1)
    throw InvalidArgument("bootstrap needs subsample_size >= 1 and repetitions >= 1");
  if (plan.subsample_size > n)
    throw InsufficientData("bootstrap subsample of " + std::to_string(plan.subsample_size) +
                           " exceeds population of " + std::to_string(n));
  Rng rng(derive_seed(plan.seed, repetition));
  std::vector<Eigen::Index> pool(n);
  std::iota(pool.begin(), pool.end(), Eigen::Index{0});
  // Partial Fisher-Yates: the first subsample_size slots form the subset.
  for (std::size_t i = 0; i < plan.subsample_size; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(plan.subsample_size);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<std::vector<Eigen::Index>> bootstrap_indices(std::size_t n,
                                                         const BootstrapPlan& plan) {
  std::vector<std::vector<Eigen::Index>> out;
  out.reserve(plan.repetitions);
  for (std::size_t r = 0; r < plan.repetitions; ++r) out.push_back(bootstrap_replicate(n, plan, r));
  return out;
}

} // namespace nasela
