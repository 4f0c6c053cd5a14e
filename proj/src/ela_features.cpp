#include "nasela/ela_features.hpp"

#include "nasela/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nasela {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string idx(Eigen::Index i) { return std::to_string(i); }

} // namespace

MinimizationSample::MinimizationSample(Matrix X, Vector y) : X_(std::move(X)), y_(std::move(y)) {
  if (X_.rows() != y_.size())
    throw DimensionMismatch("sample has " + idx(X_.rows()) + " rows but " + idx(y_.size()) +
                            " responses");
  if (X_.rows() < 1 || X_.cols() < 1) throw InsufficientData("empty sample");
  if (!X_.allFinite() || !y_.allFinite()) throw NonFiniteInput("sample contains non-finite values");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(X_.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto row_less = [this](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < X_.cols(); ++j) {
      if (X_(a, j) < X_(b, j)) return true;
      if (X_(b, j) < X_(a, j)) return false;
    }
    return false;
  };
  std::sort(order.begin(), order.end(), row_less);
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (!row_less(order[k - 1], order[k])) {
      const auto a = std::min(order[k - 1], order[k]);
      const auto b = std::max(order[k - 1], order[k]);
      throw DegenerateSample("duplicate design rows " + idx(a) + " and " + idx(b));
    }
  }
}

MinimizationSample MinimizationSample::subset(const std::vector<Eigen::Index>& indices) const {
  Matrix X(static_cast<Eigen::Index>(indices.size()), X_.cols());
  Vector y(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    X.row(static_cast<Eigen::Index>(k)) = X_.row(indices[k]);
    y(static_cast<Eigen::Index>(k)) = y_(indices[k]);
  }
  return {std::move(X), std::move(y)};
}

std::vector<Eigen::Index> rank_by_value(const Vector& y) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(y.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return y(a) < y(b); });
  return order;
}

// -- dispersion ---------------------------------------------------------------

DispersionAt dispersion_at(const MinimizationSample& s, double quantile) {
  if (!(quantile > 0.0 && quantile <= 1.0))
    throw InvalidArgument("dispersion quantile must lie in (0, 1]");
  const Eigen::Index n = s.size();
  const auto top_size =
      static_cast<Eigen::Index>(std::ceil(quantile * static_cast<double>(n) - 1e-9));
  if (top_size < 2)
    throw InsufficientData("top " + std::to_string(quantile) + " subset of " + idx(n) +
                           " points has fewer than 2 points");
  const auto order = rank_by_value(s.y());
  Matrix top(top_size, s.dim());
  for (Eigen::Index k = 0; k < top_size; ++k) top.row(k) = s.X().row(order[static_cast<std::size_t>(k)]);

  const double all = mean_pairwise_distance(s.X());
  if (!(all > 0.0)) throw DegenerateSample("all design points coincide");
  const double best = mean_pairwise_distance(top);
  return {best - all, best / all};
}

DispersionFeatures dispersion_features(const MinimizationSample& s) {
  const auto q02 = dispersion_at(s, 0.02);
  const auto q05 = dispersion_at(s, 0.05);
  return {q02.diff_mean, q05.diff_mean, q02.ratio_mean, q05.ratio_mean};
}

// -- y distribution -----------------------------------------------------------

DistributionFeatures distribution_features(const Vector& y) {
  if (y.size() < 3) throw InsufficientData("distribution features need at least 3 values");
  const auto centered = (y.array() - y.mean()).eval();
  const double n = static_cast<double>(y.size());
  const double m2 = centered.square().sum() / n;
  const double m3 = centered.cube().sum() / n;
  const double m4 = centered.square().square().sum() / n;
  if (!(m2 > 0.0)) throw DegenerateSample("y has zero variance");
  return {m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

// -- information content ------------------------------------------------------

std::vector<double> default_epsilon_grid() {
  std::vector<double> grid;
  grid.reserve(1001);
  grid.push_back(0.0);
  for (int i = 0; i < 1000; ++i) grid.push_back(std::pow(10.0, -5.0 + 20.0 * i / 999.0));
  return grid;
}

std::vector<Eigen::Index> nearest_neighbour_tour(const Matrix& X, Eigen::Index start) {
  const Eigen::Index n = X.rows();
  if (start < 0 || start >= n) throw InvalidArgument("tour start " + idx(start) + " out of range");
  std::vector<Eigen::Index> tour;
  tour.reserve(static_cast<std::size_t>(n));
  std::vector<bool> visited(static_cast<std::size_t>(n), false);
  Eigen::Index current = start;
  visited[static_cast<std::size_t>(current)] = true;
  tour.push_back(current);
  for (Eigen::Index step = 1; step < n; ++step) {
    Eigen::Index best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (visited[static_cast<std::size_t>(j)]) continue;
      const double d = (X.row(j) - X.row(current)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    current = best;
    visited[static_cast<std::size_t>(current)] = true;
    tour.push_back(current);
  }
  return tour;
}

namespace {

int symbol(double slope, double eps) {
  if (slope > eps) return 1;
  if (slope < -eps) return -1;
  return 0;
}

} // namespace

IcCurve information_content_curve(const MinimizationSample& s, const IcSettings& settings) {
  const Eigen::Index n = s.size();
  if (n < 3) throw InsufficientData("information content needs at least 3 points");
  Rng rng(settings.seed);
  const Eigen::Index start =
      settings.start ? *settings.start : static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));

  IcCurve curve;
  curve.tour = nearest_neighbour_tour(s.X(), start);
  curve.slopes.resize(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const auto a = curve.tour[static_cast<std::size_t>(i)];
    const auto b = curve.tour[static_cast<std::size_t>(i + 1)];
    const double step = (s.X().row(b) - s.X().row(a)).norm();
    if (!(step > 0.0)) throw DegenerateSample("zero-length tour step between rows " + idx(a) + " and " + idx(b));
    curve.slopes(i) = (s.y()(b) - s.y()(a)) / step;
  }

  const std::vector<double> grid = settings.epsilon.empty() ? default_epsilon_grid() : settings.epsilon;
  const auto m = static_cast<Eigen::Index>(grid.size());
  curve.epsilon = Eigen::Map<const Vector>(grid.data(), m);
  curve.entropy.resize(m);
  curve.partial_information.resize(m);

  const Eigen::Index num_slopes = n - 1;
  const double num_pairs = static_cast<double>(num_slopes - 1);
  const double log6 = std::log(6.0);
  std::vector<int> symbols(static_cast<std::size_t>(num_slopes));
  for (Eigen::Index e = 0; e < m; ++e) {
    const double eps = grid[static_cast<std::size_t>(e)];
    for (Eigen::Index i = 0; i < num_slopes; ++i)
      symbols[static_cast<std::size_t>(i)] = symbol(curve.slopes(i), eps);

    // counts[a+1][b+1] for consecutive pairs (a, b)
    std::array<std::array<double, 3>, 3> counts{};
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i)
      counts[static_cast<std::size_t>(symbols[i] + 1)][static_cast<std::size_t>(symbols[i + 1] + 1)] += 1.0;
    double h = 0.0;
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) {
        if (a == b || counts[a][b] == 0.0) continue;
        const double p = counts[a][b] / num_pairs;
        h -= p * std::log(p) / log6;
      }
    }
    curve.entropy(e) = h;

    Eigen::Index length = 0;
    int last = 0;
    for (const int sym : symbols) {
      if (sym == 0 || sym == last) continue;
      ++length;
      last = sym;
    }
    curve.partial_information(e) = static_cast<double>(length) / static_cast<double>(num_slopes);
  }
  return curve;
}

IcFeatures information_content_features(const MinimizationSample& s, const IcSettings& settings) {
  const IcCurve curve = information_content_curve(s, settings);
  const Eigen::Index m = curve.epsilon.size();
  if (m == 0) throw InvalidArgument("empty epsilon grid");

  IcFeatures f{};
  Eigen::Index arg_max = 0;
  for (Eigen::Index e = 1; e < m; ++e)
    if (curve.entropy(e) > curve.entropy(arg_max)) arg_max = e;
  f.h_max = curve.entropy(arg_max);
  f.eps_max = curve.epsilon(arg_max);

  auto smallest_positive_below = [&](double threshold) -> std::optional<double> {
    std::optional<double> best;
    for (Eigen::Index e = 0; e < m; ++e) {
      const double eps = curve.epsilon(e);
      if (eps > 0.0 && curve.entropy(e) < threshold && (!best || eps < *best)) best = eps;
    }
    return best;
  };
  const auto settled = smallest_positive_below(settings.settling_threshold);
  if (!settled)
    throw DegenerateSample("entropy never settles below " + std::to_string(settings.settling_threshold) +
                           " on the epsilon grid");
  f.eps_s = std::log10(*settled);
  const auto half = smallest_positive_below(settings.ratio * f.h_max);
  if (!half)
    throw DegenerateSample("entropy never drops below " + std::to_string(settings.ratio) +
                           " * h.max (h.max = " + std::to_string(f.h_max) + ")");
  f.eps_ratio = std::log10(*half);

  Eigen::Index zero = -1;
  for (Eigen::Index e = 0; e < m; ++e)
    if (curve.epsilon(e) == 0.0) zero = e;
  if (zero < 0) throw InvalidArgument("epsilon grid must contain 0 for ic.m0");
  f.m0 = curve.partial_information(zero);
  return f;
}

// -- meta models --------------------------------------------------------------

Matrix model_terms(const Matrix& X, MetaModel model) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  switch (model) {
  case MetaModel::linear:
    return X;
  case MetaModel::quadratic: {
    Matrix out(n, 2 * d);
    out << X, X.array().square().matrix();
    return out;
  }
  case MetaModel::linear_interactions: {
    Matrix out(n, d + d * (d - 1) / 2);
    out.leftCols(d) = X;
    Eigen::Index c = d;
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = a + 1; b < d; ++b) out.col(c++) = X.col(a).cwiseProduct(X.col(b));
    return out;
  }
  }
  throw InvalidArgument("unknown meta model");
}

LeastSquaresFit fit_least_squares(const Matrix& terms, const Vector& y) {
  const Eigen::Index n = terms.rows();
  const Eigen::Index p = terms.cols();
  if (y.size() != n) throw DimensionMismatch("response length does not match regressors");
  if (n <= p + 1)
    throw InsufficientData("least squares with " + idx(p) + " terms needs more than " + idx(p + 1) +
                           " points, got " + idx(n));
  Matrix A(n, p + 1);
  A.col(0).setOnes();
  A.rightCols(p) = terms;

  Eigen::ColPivHouseholderQR<Matrix> qr(A);
  qr.setThreshold(1e-10);
  if (qr.rank() < p + 1)
    throw SingularFit("regressor matrix has rank " + idx(qr.rank()) + " < " + idx(p + 1));

  LeastSquaresFit fit;
  fit.coefficients = qr.solve(y);
  fit.num_terms = p;
  const double ss_res = (y - A * fit.coefficients).squaredNorm();
  const double ss_tot = (y.array() - y.mean()).square().sum();
  if (!(ss_tot > 0.0)) throw DegenerateSample("y has zero variance; R^2 undefined");
  fit.r2 = 1.0 - ss_res / ss_tot;
  fit.adj_r2 = 1.0 - (1.0 - fit.r2) * static_cast<double>(n - 1) / static_cast<double>(n - p - 1);
  return fit;
}

MetaModelFeatures meta_model_features(const MinimizationSample& s) {
  const auto lin = fit_least_squares(model_terms(s.X(), MetaModel::linear), s.y());
  const auto inter = fit_least_squares(model_terms(s.X(), MetaModel::linear_interactions), s.y());
  const auto quad = fit_least_squares(model_terms(s.X(), MetaModel::quadratic), s.y());
  return {lin.adj_r2, lin.coefficients(0), inter.adj_r2, quad.adj_r2};
}

// -- nearest better clustering ------------------------------------------------

NearestBetter nearest_better(const MinimizationSample& s) {
  const Eigen::Index n = s.size();
  const Matrix dist = pairwise_distances(s.X());
  const Vector& y = s.y();

  NearestBetter nb;
  nb.nn_distance.resize(n);
  nb.nb_distance.setConstant(n, kNaN);
  nb.nb_index.assign(static_cast<std::size_t>(n), -1);
  nb.has_better.assign(static_cast<std::size_t>(n), false);
  nb.indegree.setZero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double nn = std::numeric_limits<double>::infinity();
    double better = std::numeric_limits<double>::infinity();
    Eigen::Index better_index = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = dist(i, j);
      nn = std::min(nn, d);
      if (y(j) < y(i) && d < better) {
        better = d;
        better_index = j;
      }
    }
    nb.nn_distance(i) = nn;
    if (better_index >= 0) {
      nb.nb_distance(i) = better;
      nb.nb_index[static_cast<std::size_t>(i)] = better_index;
      nb.has_better[static_cast<std::size_t>(i)] = true;
      nb.indegree(better_index) += 1.0;
    }
  }
  return nb;
}

NbcFeatures nbc_features(const MinimizationSample& s) {
  if (s.size() < 5) throw InsufficientData("nearest-better features need at least 5 points");
  const NearestBetter nb = nearest_better(s);

  std::vector<Eigen::Index> included;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (nb.has_better[static_cast<std::size_t>(i)]) included.push_back(i);
  if (included.size() < 2)
    throw DegenerateSample("fewer than two points have a strictly better neighbour");

  const auto m = static_cast<Eigen::Index>(included.size());
  Vector nn(m), better(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    nn(k) = nb.nn_distance(included[static_cast<std::size_t>(k)]);
    better(k) = nb.nb_distance(included[static_cast<std::size_t>(k)]);
  }
  const Vector ratio = nn.cwiseQuotient(better);

  const double sd_better = sample_sd(better);
  const double mean_better = better.mean();
  if (!(sd_better > 0.0)) throw DegenerateSample("nearest-better distances have zero spread");
  if (!(mean_better > 0.0)) throw DegenerateSample("nearest-better distances are all zero");

  NbcFeatures f{};
  f.nn_nb_sd_ratio = sample_sd(nn) / sd_better;
  f.nn_nb_mean_ratio = nn.mean() / mean_better;
  f.nn_nb_cor = pearson(nn, better);
  f.dist_ratio_coeff_var = sample_sd(ratio) / ratio.mean();
  f.nb_fitness_cor = pearson(nb.indegree, s.y());
  if (std::isnan(f.nn_nb_cor)) throw DegenerateSample("nn/nb distance correlation has a zero-variance input");
  if (std::isnan(f.nb_fitness_cor)) throw DegenerateSample("indegree/fitness correlation has a zero-variance input");
  return f;
}

// -- all twenty ---------------------------------------------------------------

const std::array<std::string_view, kNumFeatures>& feature_names() {
  static constexpr std::array<std::string_view, kNumFeatures> names = {
      "disp.diff_mean_02",      "disp.diff_mean_05",      "disp.ratio_mean_02",
      "disp.ratio_mean_05",     "distr.skewness",         "distr.kurtosis",
      "ic.h.max",               "ic.eps.s",               "ic.eps.max",
      "ic.eps.ratio",           "ic.m0",                  "lin_simple.adj_r2",
      "lin_simple.intercept",   "lin_w_interact.adj_r2",  "quad_simple.adj_r2",
      "nbc.nn_nb.sd_ratio",     "nbc.nn_nb.mean_ratio",   "nbc.nn_nb.cor",
      "nbc.dist_ratio.coeff_var", "nbc.nb_fitness.cor"};
  return names;
}

double LandscapeFeatures::operator[](std::string_view name) const {
  const auto& names = feature_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return values[i];
  throw InvalidArgument("unknown feature '" + std::string(name) + "'");
}

Vector LandscapeFeatures::to_vector() const {
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

namespace {

std::string describe(const std::vector<FamilyFailure>& failures) {
  std::string out = "feature computation failed in";
  for (const auto& f : failures) out += " [" + f.family + ": " + f.kind + ": " + f.message + "]";
  return out;
}

} // namespace

FeatureError::FeatureError(std::vector<FamilyFailure> failures)
    : Error(failures.size() == 1 ? failures.front().kind : "FeatureError", describe(failures)),
      failures_(std::move(failures)) {}

bool FeatureError::failed(std::string_view family) const {
  return std::any_of(failures_.begin(), failures_.end(),
                     [&](const FamilyFailure& f) { return f.family == family; });
}

LandscapeFeatures compute_all(const MinimizationSample& s, const IcSettings& settings) {
  if (s.size() < minimum_sample_size(s.dim()))
    throw InsufficientData("feature computation needs n >= 5 * d = " +
                           idx(minimum_sample_size(s.dim())) + ", got " + idx(s.size()));
  LandscapeFeatures out;
  std::vector<FamilyFailure> failures;
  auto run = [&](const char* family, auto&& body) {
    try {
      body();
    } catch (const Error& e) {
      failures.push_back({family, e.kind(), e.what()});
    }
  };
  auto& v = out.values;
  run("disp", [&] {
    const auto f = dispersion_features(s);
    v[0] = f.diff_mean_02, v[1] = f.diff_mean_05, v[2] = f.ratio_mean_02, v[3] = f.ratio_mean_05;
  });
  run("distr", [&] {
    const auto f = distribution_features(s.y());
    v[4] = f.skewness, v[5] = f.kurtosis;
  });
  run("ic", [&] {
    const auto f = information_content_features(s, settings);
    v[6] = f.h_max, v[7] = f.eps_s, v[8] = f.eps_max, v[9] = f.eps_ratio, v[10] = f.m0;
  });
  run("meta", [&] {
    const auto f = meta_model_features(s);
    v[11] = f.lin_simple_adj_r2, v[12] = f.lin_simple_intercept, v[13] = f.lin_w_interact_adj_r2,
    v[14] = f.quad_simple_adj_r2;
  });
  run("nbc", [&] {
    const auto f = nbc_features(s);
    v[15] = f.nn_nb_sd_ratio, v[16] = f.nn_nb_mean_ratio, v[17] = f.nn_nb_cor,
    v[18] = f.dist_ratio_coeff_var, v[19] = f.nb_fitness_cor;
  });
  if (failures.empty()) {
    for (std::size_t i = 0; i < kNumFeatures; ++i)
      if (!std::isfinite(v[i]))
        failures.push_back({std::string(feature_names()[i]), "DegenerateSample", "non-finite value"});
  }
  if (!failures.empty()) throw FeatureError(std::move(failures));
  return out;
}

} // namespace nasela
