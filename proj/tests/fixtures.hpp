#pragma once

// Synthetic evaluated DOEs over the builtin design space. The accuracy surface
// is smooth with one curved valley so every feature family is well defined.

#include "nasela/design_space.hpp"
#include "nasela/io.hpp"
#include "nasela/rng.hpp"
#include "nasela/sampling.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

namespace fixtures {

inline nasela::EvaluatedDoe synthetic_doe(std::size_t n, std::uint64_t seed, const std::string& label,
                                          double tilt = 1.0) {
  using namespace nasela;
  const auto space = builtin_space(BuiltinRange::initial);
  EvaluatedDoe doe;
  doe.X = lhs_sample({space, n, seed});
  doe.dataset_label = label;
  const Matrix Z = rescale_to_box(doe.X, space);
  doe.accuracy.resize(Z.rows());
  doe.cpu_time = Vector(Z.rows());
  Rng rng(derive_seed(seed, 99));
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < Z.cols(); ++j)
      s += tilt * (0.05 * (j % 5 + 1)) * Z(i, j) - 0.01 * Z(i, j) * Z(i, j) + 0.02 * std::sin(Z(i, j) * (j + 1));
    doe.accuracy(i) = 0.5 + 0.4 * std::tanh(s / 10.0 + 0.01 * rng.normal());
    (*doe.cpu_time)(i) = 10.0 + doe.X.row(i).head(3).sum() / 100.0 + rng.uniform();
  }
  return doe;
}

inline std::filesystem::path write_doe(const std::filesystem::path& dir, const std::string& name,
                                       const nasela::EvaluatedDoe& doe) {
  const auto path = dir / name;
  std::ofstream f(path);
  nasela::io::write_evaluated_doe(f, doe, nasela::builtin_space(nasela::BuiltinRange::initial));
  return path;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

} // namespace fixtures
