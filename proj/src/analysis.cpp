#include "nasela/analysis.hpp"

#include "nasela/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nasela {

CorrelationReport pearson_correlations(const EvaluatedDoe& doe, const DesignSpace& space) {
  if (doe.rows() < 3) throw InsufficientData("correlations need at least 3 rows");
  doe.validate(space);
  CorrelationReport out;
  const auto d = doe.X.cols();
  out.r.setConstant(d, 2, std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index j = 0; j < d; ++j) {
    out.parameters.push_back(space[static_cast<std::size_t>(j)].name);
    out.r(j, 0) = pearson(doe.X.col(j), doe.accuracy);
    if (doe.cpu_time) out.r(j, 1) = pearson(doe.X.col(j), *doe.cpu_time);
  }
  return out;
}

double quantile(Vector values, double p) {
  if (values.size() == 0) throw InsufficientData("quantile of an empty vector");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<Eigen::Index>(std::floor(h));
  const auto hi = std::min<Eigen::Index>(lo + 1, values.size() - 1);
  return values(lo) + (h - static_cast<double>(lo)) * (values(hi) - values(lo));
}

double silverman_bandwidth(const Vector& values) {
  const double sd = sample_sd(values);
  const double iqr = quantile(values, 0.75) - quantile(values, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  return 0.9 * spread * std::pow(static_cast<double>(values.size()), -0.2);
}

DensityCurve gaussian_kde(const Vector& values, Eigen::Index points) {
  if (values.size() < 2) throw InsufficientData("density estimate needs at least 2 values");
  if (points < 2) throw InvalidArgument("density grid needs at least 2 points");
  if (!(values.maxCoeff() > values.minCoeff()))
    throw DegenerateSample("all values equal " + std::to_string(values(0)) + "; density is a point mass");
  DensityCurve c;
  c.bandwidth = silverman_bandwidth(values);
  c.grid = Vector::LinSpaced(points, values.minCoeff() - 3.0 * c.bandwidth,
                             values.maxCoeff() + 3.0 * c.bandwidth);
  const double norm = 1.0 / (static_cast<double>(values.size()) * c.bandwidth *
                             std::sqrt(2.0 * std::numbers::pi));
  c.density.resize(points);
  for (Eigen::Index g = 0; g < points; ++g)
    c.density(g) = norm * (-0.5 * ((c.grid(g) - values.array()) / c.bandwidth).square()).exp().sum();
  return c;
}

std::vector<ParameterDensity> top_k_densities(const EvaluatedDoe& doe, const DesignSpace& space,
                                              std::size_t k) {
  if (k < 3) throw InvalidArgument("top-k densities need k >= 3");
  if (static_cast<std::size_t>(doe.rows()) < k)
    throw InsufficientData("top-" + std::to_string(k) + " densities need at least k rows");
  doe.validate(space);
  const auto top = top_k_by_accuracy(doe.accuracy, k);
  std::vector<ParameterDensity> out;
  for (Eigen::Index j = 0; j < doe.X.cols(); ++j) {
    Vector values(static_cast<Eigen::Index>(top.size()));
    for (std::size_t r = 0; r < top.size(); ++r) values(static_cast<Eigen::Index>(r)) = doe.X(top[r], j);
    ParameterDensity pd{space[static_cast<std::size_t>(j)].name, quantile(values, 0.5), {}, {}};
    try {
      pd.curve = gaussian_kde(values);
    } catch (const DegenerateSample&) {
      pd.point_mass = values(0);
    }
    out.push_back(std::move(pd));
  }
  return out;
}

namespace {

MeanSd mean_sd(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const Eigen::Map<const Vector> m(v.data(), static_cast<Eigen::Index>(v.size()));
  return {m.mean(), v.size() > 1 ? sample_sd(m) : 0.0};
}

/// Distances from `from` to its k nearest rows among `candidates` (skipping `skip`).
std::vector<std::pair<double, Eigen::Index>> k_nearest(const Matrix& vectors, Eigen::Index from,
                                                       const std::vector<Eigen::Index>& candidates,
                                                       Eigen::Index k, Eigen::Index skip) {
  std::vector<std::pair<double, Eigen::Index>> d;
  d.reserve(candidates.size());
  for (const auto c : candidates)
    if (c != skip) d.emplace_back((vectors.row(from) - vectors.row(c)).norm(), c);
  std::partial_sort(d.begin(), d.begin() + k, d.end());
  d.resize(static_cast<std::size_t>(k));
  return d;
}

} // namespace

KnnStats knn_distance_stats(const Matrix& vectors, const std::vector<std::string>& labels,
                            const std::string& query, const std::vector<bool>& reference,
                            Eigen::Index k) {
  const Eigen::Index m = vectors.rows();
  if (static_cast<Eigen::Index>(labels.size()) != m || static_cast<Eigen::Index>(reference.size()) != m)
    throw DimensionMismatch("labels and reference mask must match the number of rows");
  if (k < 1) throw InvalidArgument("k must be positive");
  std::vector<Eigen::Index> queries, refs;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (labels[static_cast<std::size_t>(i)] == query) queries.push_back(i);
    else if (reference[static_cast<std::size_t>(i)]) refs.push_back(i);
  }
  if (queries.empty()) throw InsufficientData("no rows labelled '" + query + "'");
  if (static_cast<Eigen::Index>(refs.size()) < k + 1)
    throw InsufficientData("need at least k + 1 = " + std::to_string(k + 1) + " reference rows, got " +
                           std::to_string(refs.size()));

  std::vector<double> foreign, self;
  KnnStats out;
  for (const auto q : queries) {
    for (const auto& [dist, nb] : k_nearest(vectors, q, refs, k, -1)) {
      foreign.push_back(dist);
      out.neighbours.push_back(nb);
      double sum = 0.0;
      for (const auto& [d2, unused] : k_nearest(vectors, nb, refs, k, nb)) sum += d2;
      self.push_back(sum / static_cast<double>(k));
    }
  }
  out.foreign_knn = mean_sd(foreign);
  out.neighbour_self_knn = mean_sd(self);
  return out;
}

KnnStats knn_distance_stats(const Matrix& vectors, const std::vector<std::string>& labels,
                            const std::string& query, Eigen::Index k) {
  std::vector<bool> reference(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) reference[i] = labels[i] != query;
  return knn_distance_stats(vectors, labels, query, reference, k);
}

} // namespace nasela
