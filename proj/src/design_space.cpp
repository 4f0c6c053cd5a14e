#include "nasela/design_space.hpp"

#include "nasela/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace nasela {

std::string_view to_string(ParamKind kind) {
  return kind == ParamKind::integer ? "integer" : "real";
}

ParamKind parse_param_kind(std::string_view text) {
  if (text == "integer" || text == "int") return ParamKind::integer;
  if (text == "real" || text == "float") return ParamKind::real;
  throw InvalidArgument("unknown parameter kind '" + std::string(text) + "'");
}

long long ParameterSpec::min_integer() const {
  return static_cast<long long>(std::floor(lo)) + 1;
}

long long ParameterSpec::max_integer() const {
  return static_cast<long long>(std::floor(hi));
}

DesignSpace::DesignSpace(std::vector<ParameterSpec> parameters)
    : parameters_(std::move(parameters)) {
  std::set<std::string> seen;
  for (const auto& p : parameters_) {
    if (p.name.empty()) throw InvalidArgument("parameter with empty name");
    if (!seen.insert(p.name).second)
      throw InvalidArgument("duplicate parameter name '" + p.name + "'");
    if (!std::isfinite(p.lo) || !std::isfinite(p.hi) || !(p.lo < p.hi))
      throw InvalidArgument("parameter '" + p.name + "' needs finite lo < hi");
    if (p.kind == ParamKind::integer && p.max_integer() - p.min_integer() < 1)
      throw InvalidArgument("integer parameter '" + p.name +
                            "' admits fewer than two values in (lo, hi]");
  }
}

DesignSpace DesignSpace::box(std::size_t dim, double lo, double hi) {
  std::vector<ParameterSpec> params;
  params.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i)
    params.push_back({"x_" + std::to_string(i), ParamKind::real, lo, hi});
  return DesignSpace(std::move(params));
}

std::optional<std::size_t> DesignSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < parameters_.size(); ++i)
    if (parameters_[i].name == name) return i;
  return std::nullopt;
}

Vector DesignSpace::lower() const {
  Vector v(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) v(static_cast<Eigen::Index>(i)) = parameters_[i].lo;
  return v;
}

Vector DesignSpace::upper() const {
  Vector v(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) v(static_cast<Eigen::Index>(i)) = parameters_[i].hi;
  return v;
}

namespace {

ParamKind canonical_kind(std::size_t column) {
  // filters, kernel sizes, strides and dense sizes are integral.
  return column < 14 ? ParamKind::integer : ParamKind::real;
}

} // namespace

const std::vector<std::string>& canonical_parameter_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    auto add = [&](const std::string& stem, int count) {
      for (int i = 0; i < count; ++i) out.push_back(stem + "_" + std::to_string(i));
    };
    add("filters", 3);
    add("k", 6);
    add("s", 3);
    add("dense_size", 2);
    add("dropout", 7);
    out.emplace_back("lr");
    out.emplace_back("l2");
    return out;
  }();
  return names;
}

bool DesignSpace::is_canonical() const {
  const auto& names = canonical_parameter_names();
  if (parameters_.size() != names.size()) return false;
  for (std::size_t i = 0; i < names.size(); ++i)
    if (parameters_[i].name != names[i] || parameters_[i].kind != canonical_kind(i))
      return false;
  return true;
}

void DesignSpace::require_canonical() const {
  if (!is_canonical())
    throw SchemaError("design space must list the 23 canonical parameters in order "
                      "(filters_0..2, k_0..5, s_0..2, dense_size_0..1, dropout_0..6, lr, l2)");
}

DesignSpace builtin_space(BuiltinRange which) {
  struct Row {
    const char* stem;
    int count;
    ParamKind kind;
    double init_lo, init_hi, red_lo, red_hi;
  };
  static constexpr Row rows[] = {
      {"filters", 3, ParamKind::integer, 10, 600, 250, 400},
      {"k", 6, ParamKind::integer, 1, 8, 3, 7},
      {"s", 3, ParamKind::integer, 1, 5, 2, 5},
      {"dense_size", 2, ParamKind::integer, 0, 2000, 500, 1500},
      {"dropout", 7, ParamKind::real, 1e-5, 9e-1, 1e-1, 4e-1},
      {"lr", 1, ParamKind::real, 1e-5, 1e-2, 4e-3, 9e-3},
      {"l2", 1, ParamKind::real, 1e-5, 1e-2, 5e-4, 3e-3},
  };
  std::vector<ParameterSpec> params;
  for (const auto& r : rows) {
    for (int i = 0; i < r.count; ++i) {
      std::string name = r.stem;
      if (r.count > 1) name += "_" + std::to_string(i);
      const bool initial = which == BuiltinRange::initial;
      params.push_back({name, r.kind, initial ? r.init_lo : r.red_lo,
                        initial ? r.init_hi : r.red_hi});
    }
  }
  return DesignSpace(std::move(params));
}

void check_within(const Matrix& X, const DesignSpace& space) {
  if (static_cast<std::size_t>(X.cols()) != space.size())
    throw DimensionMismatch("design matrix has " + std::to_string(X.cols()) +
                            " columns, space has " + std::to_string(space.size()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const auto& p = space[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double x = X(i, j);
      if (!(x >= p.lo && x <= p.hi))
        throw OutOfBounds("value " + std::to_string(x) + " at row " + std::to_string(i) +
                          ", column " + std::to_string(j) + " (" + p.name +
                          ") outside (" + std::to_string(p.lo) + ", " + std::to_string(p.hi) +
                          "]");
      if (p.kind == ParamKind::integer && x != std::round(x))
        throw OutOfBounds("non-integral value at row " + std::to_string(i) + ", column " +
                          std::to_string(j) + " (" + p.name + ")");
    }
  }
}

Matrix rescale_to_box(const Matrix& X, const DesignSpace& space, double target_lo,
                      double target_hi) {
  check_within(X, space);
  const Vector lo = space.lower();
  const Vector scale = (target_hi - target_lo) / (space.upper() - lo).array();
  return ((X.rowwise() - lo.transpose()).array().rowwise() * scale.transpose().array() +
          target_lo)
      .matrix();
}

Matrix rescale_from_box(const Matrix& Z, const DesignSpace& space, double target_lo,
                        double target_hi) {
  if (static_cast<std::size_t>(Z.cols()) != space.size())
    throw DimensionMismatch("matrix columns do not match the design space");
  const Vector lo = space.lower();
  const Vector width = space.upper() - lo;
  return (((Z.array() - target_lo) / (target_hi - target_lo)).rowwise() *
              width.transpose().array())
             .matrix()
             .rowwise() +
         lo.transpose();
}

Matrix round_integers(const Matrix& X, const DesignSpace& space) {
  Matrix out = X;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const auto& p = space[static_cast<std::size_t>(j)];
    if (p.kind != ParamKind::integer) continue;
    const auto lo = static_cast<double>(p.min_integer());
    const auto hi = static_cast<double>(p.max_integer());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      out(i, j) = std::clamp(std::round(X(i, j)), lo, hi);
  }
  return out;
}

void EvaluatedDoe::validate(const DesignSpace& space) const {
  const Eigen::Index n = X.rows();
  if (accuracy.size() != n)
    throw SchemaError("accuracy has " + std::to_string(accuracy.size()) + " entries for " +
                      std::to_string(n) + " design rows");
  if (cpu_time && cpu_time->size() != n)
    throw SchemaError("cpu_time length does not match the number of design rows");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(accuracy(i) >= 0.0 && accuracy(i) <= 1.0))
      throw SchemaError("accuracy at row " + std::to_string(i) + " outside [0, 1]");
    if (cpu_time && !((*cpu_time)(i) >= 0.0 && std::isfinite((*cpu_time)(i))))
      throw SchemaError("cpu_time at row " + std::to_string(i) + " must be finite and >= 0");
  }
  check_within(X, space);
}

std::vector<Eigen::Index> top_k_by_accuracy(const Vector& accuracy, std::size_t k) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(accuracy.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return accuracy(a) > accuracy(b); });
  order.resize(std::min(k, order.size()));
  return order;
}

DesignSpace reduce_range(const EvaluatedDoe& doe, const DesignSpace& space, std::size_t k) {
  if (k < 2) throw InvalidArgument("reduce_range needs k >= 2");
  if (static_cast<std::size_t>(doe.rows()) < k)
    throw InsufficientData("reduce_range needs at least k = " + std::to_string(k) +
                           " rows, got " + std::to_string(doe.rows()));
  doe.validate(space);
  const auto top = top_k_by_accuracy(doe.accuracy, k);
  std::vector<ParameterSpec> params = space.parameters();
  for (std::size_t j = 0; j < params.size(); ++j) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto row : top) {
      lo = std::min(lo, doe.X(row, static_cast<Eigen::Index>(j)));
      hi = std::max(hi, doe.X(row, static_cast<Eigen::Index>(j)));
    }
    params[j].lo = lo;
    params[j].hi = hi;
    const bool collapsed = !(lo < hi) || (params[j].kind == ParamKind::integer &&
                                         params[j].max_integer() - params[j].min_integer() < 1);
    if (collapsed)
      throw DegenerateSample("top-" + std::to_string(k) + " rows span too narrow a range of '" +
                             params[j].name + "' to form a valid parameter range");
  }
  return DesignSpace(std::move(params));
}

} // namespace nasela
