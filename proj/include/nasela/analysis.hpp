#pragma once

#include "nasela/design_space.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace nasela {

/// Pearson r of every parameter against accuracy (column 0) and cpu_time
/// (column 1). NaN marks an undefined entry.
struct CorrelationReport {
  std::vector<std::string> parameters;
  Matrix r;

  bool defined(Eigen::Index param, Eigen::Index response) const { return !std::isnan(r(param, response)); }
};

CorrelationReport pearson_correlations(const EvaluatedDoe& doe, const DesignSpace& space);

struct DensityCurve {
  Vector grid;
  Vector density;
  double bandwidth;
};

/// Silverman rule of thumb 0.9 * min(sd, IQR / 1.34) * n^(-1/5). Falls back to
/// sd when the IQR is zero.
double silverman_bandwidth(const Vector& values);

/// Linear-interpolation sample quantile (type 7).
double quantile(Vector values, double p);

/// Gaussian KDE on `points` equally spaced abscissae over [min - 3h, max + 3h].
/// Throws DegenerateSample for constant input.
DensityCurve gaussian_kde(const Vector& values, Eigen::Index points = 256);

/// Top-k marginal of one parameter: either a curve or a point mass.
struct ParameterDensity {
  std::string name;
  double median;
  std::optional<DensityCurve> curve;
  std::optional<double> point_mass;
};

std::vector<ParameterDensity> top_k_densities(const EvaluatedDoe& doe, const DesignSpace& space,
                                              std::size_t k = 50);

struct MeanSd {
  double mean;
  double sd;
};

struct KnnStats {
  MeanSd foreign_knn;        ///< distances from the query rows to their k nearest reference rows
  MeanSd neighbour_self_knn; ///< each such neighbour's mean distance to its own k nearest reference rows
  std::vector<Eigen::Index> neighbours;
};

/// Query rows are those labelled `query`; reference rows are the rows with
/// `reference[i] == true` (typically every row not labelled `query`). With
/// several query rows the per-row neighbour sets are pooled.
KnnStats knn_distance_stats(const Matrix& vectors, const std::vector<std::string>& labels,
                            const std::string& query, const std::vector<bool>& reference,
                            Eigen::Index k = 20);

/// Reference = all rows whose label differs from `query`.
KnnStats knn_distance_stats(const Matrix& vectors, const std::vector<std::string>& labels,
                            const std::string& query, Eigen::Index k = 20);

} // namespace nasela
