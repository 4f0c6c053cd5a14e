#pragma once

// The 24 noiseless BBOB functions with seeded instance transformations.
// Instances are generated by our own seeding scheme and are not numerically
// identical to COCO's; the raw functions and coordinate maps follow the
// published definitions.

#include "nasela/ela_features.hpp"
#include "nasela/linalg.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nasela::bbob {

inline constexpr int kNumFunctions = 24;

std::string function_name(int fid);

/// Gallagher peak data (f21, f22).
struct Peaks {
  Matrix centers; ///< one peak per row; row 0 is the global optimum
  Vector weights;
  Matrix conditioning; ///< per-peak diagonal of C_i, one peak per row
};

class Instance {
public:
  int fid() const { return fid_; }
  int instance() const { return instance_; }
  Eigen::Index dim() const { return dim_; }
  const Vector& x_opt() const { return x_opt_; }
  double f_opt() const { return f_opt_; }
  /// Rotation matrices (identity-sized 0x0 when the function does not use them).
  const Matrix& rotation_r() const { return R_; }
  const Matrix& rotation_q() const { return Q_; }

  /// Throws DimensionMismatch or NonFiniteInput.
  double operator()(const Eigen::Ref<const Vector>& x) const;

  /// Row-wise evaluation.
  Vector evaluate_rows(const Matrix& X) const;

private:
  friend Instance make_instance(int fid, int instance, Eigen::Index dim);

  double raw(const Vector& x) const;

  int fid_ = 0;
  int instance_ = 0;
  Eigen::Index dim_ = 0;
  Vector x_opt_;
  double f_opt_ = 0.0;
  Matrix R_, Q_;
  Vector signs_;  ///< random +-1 vector (f20, f24)
  Peaks peaks_;
};

/// Deterministic per (fid, instance, dim). Throws UnknownFunction / InvalidArgument.
Instance make_instance(int fid, int instance, Eigen::Index dim);

/// Seeded random orthogonal matrix: QR of a standard-normal matrix with the
/// triangular factor's diagonal made positive.
Matrix random_rotation(Eigen::Index dim, std::uint64_t seed);

// Coordinate maps from the BBOB definitions.
Vector t_osz(const Vector& x);
Vector t_asy(const Vector& x, double beta);
Vector lambda_diagonal(Eigen::Index dim, double alpha);
double f_pen(const Vector& x);

struct FeatureRow {
  int fid;
  int instance;
  LandscapeFeatures features;
};

struct FeatureTableSettings {
  Eigen::Index dim = 23;
  int instances = 20;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  std::vector<int> fids; ///< empty = all 24
  unsigned threads = 0;  ///< 0 = hardware concurrency
};

/// LHS in [-5, 5]^dim, evaluate, compute all features; rows ordered by (fid, instance).
/// Errors carry the (fid, instance) context.
std::vector<FeatureRow> feature_table(const FeatureTableSettings& settings);

/// LHS sample used for one (fid, instance) cell of the feature table.
Matrix table_sample(const FeatureTableSettings& settings, int fid, int instance);

} // namespace nasela::bbob
