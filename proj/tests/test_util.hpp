#pragma once

#include "nasela/linalg.hpp"
#include "nasela/rng.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>

namespace testutil {

inline oracle::Points to_points(const nasela::Matrix& X) {
  oracle::Points p(static_cast<std::size_t>(X.rows()), std::vector<double>(static_cast<std::size_t>(X.cols())));
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j) p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = X(i, j);
  return p;
}

inline oracle::Values to_values(const nasela::Vector& y) { return {y.data(), y.data() + y.size()}; }

/// Uniform points in [-5, 5]^d.
inline nasela::Matrix uniform_points(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  nasela::Rng rng(seed);
  nasela::Matrix X(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) X(i, j) = rng.uniform(-5.0, 5.0);
  return X;
}

inline nasela::Vector normal_values(Eigen::Index n, std::uint64_t seed) {
  nasela::Rng rng(seed);
  nasela::Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = rng.normal();
  return y;
}

/// |a - b| <= rel * max(|a|, |b|), with an absolute floor for values at zero.
inline bool rel_close(double a, double b, double rel, double abs_floor = 1e-12) {
  if (a == b) return true;
  const double diff = std::abs(a - b);
  return diff <= rel * std::max(std::abs(a), std::abs(b)) || diff <= abs_floor;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("nasela_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

} // namespace testutil
