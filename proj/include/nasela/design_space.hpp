#pragma once

#include "nasela/linalg.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nasela {

enum class ParamKind { integer, real };

std::string_view to_string(ParamKind kind);
ParamKind parse_param_kind(std::string_view text);

/// One bounded hyper-parameter. Values live in the half-open interval (lo, hi].
struct ParameterSpec {
  std::string name;
  ParamKind kind = ParamKind::real;
  double lo = 0.0;
  double hi = 1.0;

  /// Smallest and largest admissible integer for integer kinds.
  long long min_integer() const;
  long long max_integer() const;

  bool operator==(const ParameterSpec&) const = default;
};

/// Ordered box of named parameters. The architecture spaces use the 23
/// canonical names; other boxes (e.g. the benchmark domain) are allowed.
class DesignSpace {
public:
  DesignSpace() = default;
  /// Throws InvalidArgument unless names are unique, lo < hi, and integer
  /// parameters admit at least two values.
  explicit DesignSpace(std::vector<ParameterSpec> parameters);

  /// Box of `dim` real parameters x_0.. over (lo, hi].
  static DesignSpace box(std::size_t dim, double lo, double hi);

  /// True for exactly the 23 canonical names, in order, with Table kinds.
  bool is_canonical() const;
  void require_canonical() const;

  const std::vector<ParameterSpec>& parameters() const { return parameters_; }
  const ParameterSpec& operator[](std::size_t i) const { return parameters_[i]; }
  std::size_t size() const { return parameters_.size(); }

  std::optional<std::size_t> index_of(std::string_view name) const;

  Vector lower() const;
  Vector upper() const;

  bool operator==(const DesignSpace&) const = default;

private:
  std::vector<ParameterSpec> parameters_;
};

inline constexpr std::size_t kNumParameters = 23;

/// The 23 canonical parameter names in column order.
const std::vector<std::string>& canonical_parameter_names();

enum class BuiltinRange { initial, reduced };

DesignSpace builtin_space(BuiltinRange which);

/// Per-column affine map of X from each parameter's [lo, hi] onto
/// [target_lo, target_hi]. Throws OutOfBounds naming (row, column).
Matrix rescale_to_box(const Matrix& X, const DesignSpace& space,
                      double target_lo = -5.0, double target_hi = 5.0);

/// Inverse of rescale_to_box.
Matrix rescale_from_box(const Matrix& Z, const DesignSpace& space,
                        double target_lo = -5.0, double target_hi = 5.0);

/// Throws OutOfBounds unless every entry lies in its parameter's range and
/// integer columns hold integral values.
void check_within(const Matrix& X, const DesignSpace& space);

/// Rounds integer columns to the nearest admissible integer in (lo, hi].
Matrix round_integers(const Matrix& X, const DesignSpace& space);

/// A design matrix with its measured responses.
struct EvaluatedDoe {
  Matrix X;
  Vector accuracy;
  std::optional<Vector> cpu_time;
  std::string dataset_label;

  Eigen::Index rows() const { return X.rows(); }
  /// Throws SchemaError / OutOfBounds on any invariant violation.
  void validate(const DesignSpace& space) const;
};

/// Indices of the k best rows by descending accuracy, ties by lower index.
std::vector<Eigen::Index> top_k_by_accuracy(const Vector& accuracy, std::size_t k);

/// Bounds = [min, max] of each parameter over the k most accurate rows.
DesignSpace reduce_range(const EvaluatedDoe& doe, const DesignSpace& space,
                         std::size_t k = 50);

} // namespace nasela
