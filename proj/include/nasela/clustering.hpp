#pragma once

#include "nasela/linalg.hpp"

#include <string>
#include <vector>

namespace nasela {

/// Column-wise z-scores (sample sd). Zero-variance columns are dropped and
/// their indices reported.
struct Standardized {
  Matrix values;
  std::vector<Eigen::Index> kept;
  std::vector<Eigen::Index> dropped;
};

Standardized standardize_columns(const Matrix& X);

/// Only complete linkage is implemented; the enum leaves room for others.
enum class Linkage { complete };

/// One agglomeration step. Leaves are nodes 0..m-1, merge t creates node m+t.
struct Merge {
  Eigen::Index left;  ///< smaller node id
  Eigen::Index right; ///< larger node id
  double height;
  Eigen::Index size;
};

struct Dendrogram {
  std::vector<std::string> leaf_labels;
  std::vector<Merge> merges;
  bool standardized = false;
  std::vector<Eigen::Index> dropped_columns; ///< zero-variance columns removed before clustering

  Eigen::Index num_leaves() const { return static_cast<Eigen::Index>(leaf_labels.size()); }
};

/// Complete-linkage agglomeration on a precomputed distance matrix. Equal
/// distances merge the lexicographically smallest (left id, right id) first.
Dendrogram complete_linkage(const Matrix& distances, std::vector<std::string> labels = {});

/// Standardizes (optionally), computes Euclidean distances and agglomerates.
/// Throws NonFiniteInput / InsufficientData.
Dendrogram hierarchical_cluster(const Matrix& vectors, std::vector<std::string> labels = {},
                                bool standardize = true, Linkage linkage = Linkage::complete);

/// Leaf -> cluster id after undoing the num_clusters - 1 last merges. Cluster
/// ids are numbered by their smallest leaf.
std::vector<int> cut(const Dendrogram& dendrogram, Eigen::Index num_clusters);

/// Fraction of leaves whose cluster's majority group matches their own group.
double purity(const std::vector<int>& clusters, const std::vector<std::string>& groups);

struct Embedding2D {
  Matrix coordinates;       ///< m x k
  Vector eigenvalues;       ///< top-k eigenvalues of the centred Gram matrix, descending
  double captured_fraction; ///< clamped top-k mass / total positive mass
  double clamped_mass;      ///< total magnitude of negative eigenvalues set to zero
};

/// Torgerson scaling of a symmetric distance matrix.
Embedding2D classical_mds(const Matrix& distances, Eigen::Index k = 2);

/// classical_mds on the Euclidean distances between the rows of `points`.
Embedding2D classical_mds_points(const Matrix& points, Eigen::Index k = 2);

} // namespace nasela
