#include "nasela/clustering.hpp"

#include "nasela/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace nasela {

Standardized standardize_columns(const Matrix& X) {
  Standardized out;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double sd = sample_sd(X.col(j));
    (sd > 0.0 ? out.kept : out.dropped).push_back(j);
  }
  out.values.resize(X.rows(), static_cast<Eigen::Index>(out.kept.size()));
  for (std::size_t c = 0; c < out.kept.size(); ++c) {
    const auto col = X.col(out.kept[c]);
    out.values.col(static_cast<Eigen::Index>(c)) = (col.array() - col.mean()) / sample_sd(col);
  }
  return out;
}

Dendrogram complete_linkage(const Matrix& distances, std::vector<std::string> labels) {
  const Eigen::Index m = distances.rows();
  if (distances.cols() != m) throw DimensionMismatch("distance matrix must be square");
  if (m < 2) throw InsufficientData("clustering needs at least 2 rows");
  if (!distances.allFinite()) throw NonFiniteInput("distance matrix has non-finite entries");
  if (labels.empty())
    for (Eigen::Index i = 0; i < m; ++i) labels.push_back(std::to_string(i));
  if (static_cast<Eigen::Index>(labels.size()) != m)
    throw DimensionMismatch("label count does not match the number of rows");

  Dendrogram out;
  out.leaf_labels = std::move(labels);

  // Slot i holds one active cluster; node[i] is its id, size[i] its leaf count.
  Matrix dist = distances;
  std::vector<Eigen::Index> node(static_cast<std::size_t>(m));
  std::iota(node.begin(), node.end(), Eigen::Index{0});
  std::vector<Eigen::Index> size(static_cast<std::size_t>(m), 1);
  std::vector<Eigen::Index> active(static_cast<std::size_t>(m));
  std::iota(active.begin(), active.end(), Eigen::Index{0});

  for (Eigen::Index step = 0; step < m - 1; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::pair<Eigen::Index, Eigen::Index> best_ids{m * 2, m * 2};
    std::size_t best_a = 0, best_b = 0;
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        const double d = dist(active[a], active[b]);
        const auto ia = node[static_cast<std::size_t>(active[a])];
        const auto ib = node[static_cast<std::size_t>(active[b])];
        const std::pair<Eigen::Index, Eigen::Index> ids{std::min(ia, ib), std::max(ia, ib)};
        if (d < best || (d == best && ids < best_ids)) {
          best = d;
          best_ids = ids;
          best_a = a;
          best_b = b;
        }
      }
    }
    const Eigen::Index sa = active[best_a];
    const Eigen::Index sb = active[best_b];
    const Eigen::Index merged_size = size[static_cast<std::size_t>(sa)] + size[static_cast<std::size_t>(sb)];
    out.merges.push_back({best_ids.first, best_ids.second, best, merged_size});

    for (const Eigen::Index c : active) {
      if (c == sa || c == sb) continue;
      const double d = std::max(dist(sa, c), dist(sb, c));
      dist(sa, c) = d;
      dist(c, sa) = d;
    }
    node[static_cast<std::size_t>(sa)] = m + step;
    size[static_cast<std::size_t>(sa)] = merged_size;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
  }
  return out;
}

Dendrogram hierarchical_cluster(const Matrix& vectors, std::vector<std::string> labels,
                                bool standardize, Linkage) {
  if (vectors.rows() < 2) throw InsufficientData("clustering needs at least 2 rows");
  if (!vectors.allFinite()) throw NonFiniteInput("feature matrix has non-finite entries");
  Matrix values = vectors;
  std::vector<Eigen::Index> dropped;
  if (standardize) {
    auto z = standardize_columns(vectors);
    values = std::move(z.values);
    dropped = std::move(z.dropped);
  }
  Dendrogram out = complete_linkage(pairwise_distances(values), std::move(labels));
  out.standardized = standardize;
  out.dropped_columns = std::move(dropped);
  return out;
}

std::vector<int> cut(const Dendrogram& dendrogram, Eigen::Index num_clusters) {
  const Eigen::Index m = dendrogram.num_leaves();
  if (num_clusters < 1 || num_clusters > m)
    throw InvalidArgument("cut needs 1 <= num_clusters <= " + std::to_string(m));

  std::vector<Eigen::Index> parent(static_cast<std::size_t>(2 * m - 1));
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  for (Eigen::Index t = 0; t < m - num_clusters; ++t) {
    const auto& mg = dendrogram.merges[static_cast<std::size_t>(t)];
    parent[static_cast<std::size_t>(find(mg.left))] = m + t;
    parent[static_cast<std::size_t>(find(mg.right))] = m + t;
  }
  std::vector<int> labels(static_cast<std::size_t>(m));
  std::map<Eigen::Index, int> ids;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto root = find(i);
    auto it = ids.try_emplace(root, static_cast<int>(ids.size())).first;
    labels[static_cast<std::size_t>(i)] = it->second;
  }
  return labels;
}

double purity(const std::vector<int>& clusters, const std::vector<std::string>& groups) {
  if (clusters.size() != groups.size()) throw DimensionMismatch("cluster and group counts differ");
  if (clusters.empty()) return 1.0;
  std::map<int, std::map<std::string, std::size_t>> counts;
  for (std::size_t i = 0; i < clusters.size(); ++i) ++counts[clusters[i]][groups[i]];
  std::size_t majority = 0;
  for (const auto& [cluster, by_group] : counts) {
    std::size_t best = 0;
    for (const auto& [group, c] : by_group) best = std::max(best, c);
    majority += best;
  }
  return static_cast<double>(majority) / static_cast<double>(clusters.size());
}

Embedding2D classical_mds(const Matrix& distances, Eigen::Index k) {
  const Eigen::Index m = distances.rows();
  if (distances.cols() != m) throw DimensionMismatch("distance matrix must be square");
  if (m < 1 || k < 1 || k > m) throw InvalidArgument("MDS needs 1 <= k <= m");
  if (!distances.allFinite()) throw NonFiniteInput("distance matrix has non-finite entries");
  const double scale = std::max(1.0, distances.cwiseAbs().maxCoeff());
  if ((distances - distances.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidArgument("distance matrix is not symmetric");
  if (distances.minCoeff() < 0.0 || distances.diagonal().cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidArgument("distance matrix needs non-negative entries and a zero diagonal");

  const Matrix sq = distances.array().square();
  const Vector row_mean = sq.rowwise().mean();
  const double grand = row_mean.mean();
  Matrix B = -0.5 * ((sq.colwise() - row_mean).rowwise() - row_mean.transpose()).array() - 0.5 * grand;
  B = 0.5 * (B + B.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> solver(B);
  if (solver.info() != Eigen::Success) throw NonFiniteInput("eigendecomposition failed");
  const Vector& values = solver.eigenvalues(); // ascending
  const double top = std::max(values(m - 1), 0.0);
  const double floor = 1e-10 * top;

  Embedding2D out;
  out.eigenvalues.resize(k);
  out.coordinates.resize(m, k);
  double positive_mass = 0.0, clamped = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (values(i) > floor)
      positive_mass += values(i);
    else if (values(i) < 0.0)
      clamped += -values(i);
  }
  double kept = 0.0;
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::Index src = m - 1 - c;
    const double lambda = values(src) > floor ? values(src) : 0.0;
    out.eigenvalues(c) = values(src);
    kept += lambda;
    Vector v = solver.eigenvectors().col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    out.coordinates.col(c) = std::sqrt(lambda) * v;
  }
  out.captured_fraction = positive_mass > 0.0 ? kept / positive_mass : 0.0;
  out.clamped_mass = clamped;
  return out;
}

Embedding2D classical_mds_points(const Matrix& points, Eigen::Index k) {
  if (!points.allFinite()) throw NonFiniteInput("points have non-finite entries");
  return classical_mds(pairwise_distances(points), k);
}

} // namespace nasela
