#pragma once

// Exploratory landscape features of a sample (X, y) where lower y is better.
// Twenty features in five families: dispersion, y-distribution, information
// content, meta-model fits and nearest-better clustering.

#include "nasela/errors.hpp"
#include "nasela/linalg.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nasela {

/// Validated (X, y) pair: finite entries, matching sizes, no duplicate rows.
class MinimizationSample {
public:
  MinimizationSample(Matrix X, Vector y);

  const Matrix& X() const { return X_; }
  const Vector& y() const { return y_; }
  Eigen::Index size() const { return X_.rows(); }
  Eigen::Index dim() const { return X_.cols(); }

  /// Rows `indices` of this sample.
  MinimizationSample subset(const std::vector<Eigen::Index>& indices) const;

private:
  Matrix X_;
  Vector y_;
};

/// Negated accuracy: the most accurate design becomes the minimum.
inline Vector orient_for_minimization(const Vector& accuracy) { return -accuracy; }

/// Row order by ascending y, ties by lower index.
std::vector<Eigen::Index> rank_by_value(const Vector& y);

// -- dispersion ---------------------------------------------------------------

struct DispersionAt {
  double diff_mean;  ///< D(top) - D(all)
  double ratio_mean; ///< D(top) / D(all)
};

/// Compares the mean pairwise distance of the best ceil(q*n) rows with that of
/// the whole sample.
DispersionAt dispersion_at(const MinimizationSample& s, double quantile);

struct DispersionFeatures {
  double diff_mean_02, diff_mean_05, ratio_mean_02, ratio_mean_05;
};

DispersionFeatures dispersion_features(const MinimizationSample& s);

// -- y distribution -----------------------------------------------------------

struct DistributionFeatures {
  double skewness;
  double kurtosis; ///< excess kurtosis (normal = 0)
};

DistributionFeatures distribution_features(const Vector& y);

// -- information content ------------------------------------------------------

struct IcSettings {
  /// Picks the tour start when `start` is unset.
  std::uint64_t seed = 1;
  std::optional<Eigen::Index> start;
  /// Empty means the default grid: 0 followed by 1000 log-spaced values in
  /// [1e-5, 1e15].
  std::vector<double> epsilon;
  double settling_threshold = 0.05;
  double ratio = 0.5;
};

std::vector<double> default_epsilon_grid();

/// Everything the information-content features are read from.
struct IcCurve {
  std::vector<Eigen::Index> tour;
  Vector slopes;
  Vector epsilon;
  Vector entropy;             ///< H(eps), base-6 entropy of unequal symbol pairs
  Vector partial_information; ///< M(eps)
};

/// Nearest-neighbour tour from a (seeded) start point, ties to lower index.
std::vector<Eigen::Index> nearest_neighbour_tour(const Matrix& X, Eigen::Index start);

IcCurve information_content_curve(const MinimizationSample& s, const IcSettings& settings = {});

struct IcFeatures {
  double h_max, eps_s, eps_max, eps_ratio, m0;
};

IcFeatures information_content_features(const MinimizationSample& s,
                                        const IcSettings& settings = {});

// -- meta models --------------------------------------------------------------

enum class MetaModel { linear, linear_interactions, quadratic };

/// Regressor matrix without the intercept column.
Matrix model_terms(const Matrix& X, MetaModel model);

struct LeastSquaresFit {
  Vector coefficients; ///< intercept first
  double r2;
  double adj_r2;
  Eigen::Index num_terms; ///< non-intercept coefficients
};

/// Least squares of y on [1, terms] through column-pivoted Householder QR.
LeastSquaresFit fit_least_squares(const Matrix& terms, const Vector& y);

struct MetaModelFeatures {
  double lin_simple_adj_r2, lin_simple_intercept, lin_w_interact_adj_r2, quad_simple_adj_r2;
};

MetaModelFeatures meta_model_features(const MinimizationSample& s);

// -- nearest better clustering ------------------------------------------------

struct NearestBetter {
  Vector nn_distance;                       ///< d_nn(i)
  Vector nb_distance;                       ///< d_nb(i); NaN where no better point exists
  std::vector<Eigen::Index> nb_index;       ///< -1 where no better point exists
  std::vector<bool> has_better;
  Vector indegree;                          ///< how many points pick i as nearest better
};

NearestBetter nearest_better(const MinimizationSample& s);

struct NbcFeatures {
  double nn_nb_sd_ratio, nn_nb_mean_ratio, nn_nb_cor, dist_ratio_coeff_var, nb_fitness_cor;
};

NbcFeatures nbc_features(const MinimizationSample& s);

// -- all twenty ---------------------------------------------------------------

inline constexpr std::size_t kNumFeatures = 20;

const std::array<std::string_view, kNumFeatures>& feature_names();

struct LandscapeFeatures {
  std::array<double, kNumFeatures> values{};

  double operator[](std::string_view name) const;
  Vector to_vector() const;
};

/// One failing family inside compute_all.
struct FamilyFailure {
  std::string family;
  std::string kind;
  std::string message;
};

/// Raised by compute_all; lists every family that failed.
class FeatureError : public Error {
public:
  explicit FeatureError(std::vector<FamilyFailure> failures);
  const std::vector<FamilyFailure>& failures() const { return failures_; }
  bool failed(std::string_view family) const;

private:
  std::vector<FamilyFailure> failures_;
};

/// Minimum sample size enforced by compute_all: 5 * dimension.
inline Eigen::Index minimum_sample_size(Eigen::Index dim) { return 5 * dim; }

LandscapeFeatures compute_all(const MinimizationSample& s, const IcSettings& settings = {});

} // namespace nasela
