#pragma once

#include "nasela/design_space.hpp"

#include <cstdint>
#include <vector>

namespace nasela {

struct DoePlan {
  DesignSpace space;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
};

/// Latin hypercube values before integer rounding: column j places exactly one
/// point in each of the n equal-width strata of (lo_j, hi_j].
Matrix lhs_continuous(const DoePlan& plan);

/// lhs_continuous followed by integer rounding; deterministic in (space, n, seed).
Matrix lhs_sample(const DoePlan& plan);

/// True when every column of `continuous` has exactly one value per stratum.
bool check_stratification(const Matrix& continuous, const DesignSpace& space);

struct BootstrapPlan {
  std::size_t subsample_size = 800;
  std::size_t repetitions = 30;
  std::uint64_t seed = 1;
};

/// Without-replacement subsets of {0..n-1}, each returned in ascending order.
/// Repetition r draws from derive_seed(seed, r), so any subset can be produced
/// independently of the others.
std::vector<std::vector<Eigen::Index>> bootstrap_indices(std::size_t n,
                                                         const BootstrapPlan& plan);

std::vector<Eigen::Index> bootstrap_replicate(std::size_t n, const BootstrapPlan& plan,
                                              std::size_t repetition);

} // namespace nasela
