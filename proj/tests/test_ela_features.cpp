#include "nasela/ela_features.hpp"
#include "nasela/errors.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <numbers>

using namespace nasela;
using testutil::rel_close;

namespace {

MinimizationSample random_sample(Eigen::Index n, Eigen::Index d, std::uint64_t seed,
                                 double (*f)(const Eigen::Ref<const Vector>&)) {
  Matrix X = testutil::uniform_points(n, d, seed);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = f(X.row(i).transpose());
  return {X, y};
}

double rastrigin_like(const Eigen::Ref<const Vector>& x) {
  double s = 0;
  for (Eigen::Index j = 0; j < x.size(); ++j)
    s += x(j) * x(j) - 3 * std::cos(2 * std::numbers::pi * x(j)) + 0.3 * (j + 1) * x(j);
  return s;
}

double sphere(const Eigen::Ref<const Vector>& x) { return x.squaredNorm(); }

void check_against_oracles(const MinimizationSample& s, double rel) {
  const auto X = testutil::to_points(s.X());
  const auto y = testutil::to_values(s.y());

  const auto disp = dispersion_features(s);
  const auto [d2, r2] = oracle::dispersion(X, y, 2);
  const auto [d5, r5] = oracle::dispersion(X, y, 5);
  CHECK(rel_close(disp.diff_mean_02, d2, rel));
  CHECK(rel_close(disp.diff_mean_05, d5, rel));
  CHECK(rel_close(disp.ratio_mean_02, r2, rel));
  CHECK(rel_close(disp.ratio_mean_05, r5, rel));

  const auto distr = distribution_features(s.y());
  const auto [sk, ku] = oracle::skew_kurt(y);
  CHECK(rel_close(distr.skewness, sk, rel));
  CHECK(rel_close(distr.kurtosis, ku, rel));

  IcSettings ic;
  ic.start = 3;
  const auto f_ic = information_content_features(s, ic);
  const auto o_ic = oracle::information_content(X, y, 3, default_epsilon_grid());
  CHECK(rel_close(f_ic.h_max, o_ic.h_max, rel));
  CHECK(rel_close(f_ic.eps_s, o_ic.eps_s, rel));
  CHECK(rel_close(f_ic.eps_max, o_ic.eps_max, rel));
  CHECK(rel_close(f_ic.eps_ratio, o_ic.eps_ratio, rel));
  CHECK(rel_close(f_ic.m0, o_ic.m0, rel));

  const auto meta = meta_model_features(s);
  const auto o_meta = oracle::meta_models(X, y);
  CHECK(rel_close(meta.lin_simple_adj_r2, o_meta.lin_adj, rel));
  CHECK(rel_close(meta.lin_simple_intercept, o_meta.lin_intercept, rel));
  CHECK(rel_close(meta.lin_w_interact_adj_r2, o_meta.inter_adj, rel));
  CHECK(rel_close(meta.quad_simple_adj_r2, o_meta.quad_adj, rel));

  const auto nbc = nbc_features(s);
  const auto o_nbc = oracle::nearest_better(X, y);
  CHECK(rel_close(nbc.nn_nb_sd_ratio, o_nbc.sd_ratio, rel));
  CHECK(rel_close(nbc.nn_nb_mean_ratio, o_nbc.mean_ratio, rel));
  CHECK(rel_close(nbc.nn_nb_cor, o_nbc.cor, rel));
  CHECK(rel_close(nbc.dist_ratio_coeff_var, o_nbc.coeff_var, rel));
  CHECK(rel_close(nbc.nb_fitness_cor, o_nbc.fitness_cor, rel));
}

} // namespace

TEST_CASE("feature names follow the fixed order") {
  const auto& names = feature_names();
  CHECK(names.front() == "disp.diff_mean_02");
  CHECK(names[6] == "ic.h.max");
  CHECK(names[13] == "lin_w_interact.adj_r2");
  CHECK(names.back() == "nbc.nb_fitness.cor");
}

TEST_CASE("all families agree with brute-force oracles") {
  SUBCASE("d = 2") { check_against_oracles(random_sample(100, 2, 1, rastrigin_like), 1e-8); }
  SUBCASE("d = 5") { check_against_oracles(random_sample(150, 5, 2, rastrigin_like), 1e-8); }
  SUBCASE("d = 10, n = 120") { check_against_oracles(random_sample(120, 10, 3, rastrigin_like), 1e-8); }
}

TEST_CASE("compute_all matches the per-family calls") {
  const auto s = random_sample(200, 4, 5, rastrigin_like);
  IcSettings ic;
  ic.start = 0;
  const auto all = compute_all(s, ic);
  CHECK(all["disp.ratio_mean_05"] == dispersion_features(s).ratio_mean_05);
  CHECK(all["ic.m0"] == information_content_features(s, ic).m0);
  CHECK(all["nbc.nb_fitness.cor"] == nbc_features(s).nb_fitness_cor);
  CHECK(all.to_vector().size() == 20);
  CHECK_THROWS_AS((void)all["no.such.feature"], InvalidArgument);
}

TEST_CASE("skewness of {0, 0, 0, 1}") {
  Vector y(4);
  y << 0, 0, 0, 1;
  const auto f = distribution_features(y);
  CHECK(f.skewness == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(f.kurtosis == doctest::Approx(-2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("zig-zag and monotone information content") {
  const Eigen::Index n = 40;
  Matrix X(n, 1);
  Vector zig(n), mono(n), flat = Vector::Constant(n, 2.5);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = static_cast<double>(i);
    zig(i) = (i % 2 == 0) ? 0.0 : 1.0;
    mono(i) = static_cast<double>(i);
  }
  IcSettings settings;
  settings.start = 0;

  const auto zc = information_content_curve({X, zig}, settings);
  CHECK(zc.epsilon(0) == 0.0);
  CHECK(zc.entropy(0) == doctest::Approx(std::log(2.0) / std::log(6.0)).epsilon(1e-12));
  CHECK(zc.entropy(zc.entropy.size() - 1) == 0.0);

  const auto mc = information_content_curve({X, mono}, settings);
  for (Eigen::Index e = 0; e < mc.entropy.size(); ++e) CHECK(mc.entropy(e) == 0.0);
  CHECK(mc.partial_information(0) == doctest::Approx(1.0 / (n - 1)));

  const auto fc = information_content_curve({X, flat}, settings);
  CHECK(fc.entropy.maxCoeff() == 0.0);
  CHECK(fc.partial_information(0) == 0.0);
}

TEST_CASE("tour visits every point once with ties to the lower index") {
  Matrix X(4, 1);
  X << 0, 1, -1, 2;
  CHECK(nearest_neighbour_tour(X, 0) == std::vector<Eigen::Index>{0, 1, 3, 2});
  const Matrix R = testutil::uniform_points(60, 3, 4);
  auto tour = nearest_neighbour_tour(R, 17);
  CHECK(tour.front() == 17);
  std::sort(tour.begin(), tour.end());
  for (Eigen::Index i = 0; i < 60; ++i) CHECK(tour[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("five collinear points with monotone y") {
  Matrix X(5, 1);
  X << 0, 1, 2, 3, 4;
  Vector y(5);
  y << 0, 1, 2, 3, 4;
  const MinimizationSample s(X, y);
  const auto nb = nearest_better(s);
  CHECK_FALSE(nb.has_better[0]);
  for (Eigen::Index i = 1; i < 5; ++i) {
    CHECK(nb.nn_distance(i) == 1.0);
    CHECK(nb.nb_distance(i) == 1.0);
    CHECK(nb.nb_index[static_cast<std::size_t>(i)] == i - 1);
  }
  CHECK(std::isnan(nb.nb_distance(0)));
  // Every nb distance equals 1: mean ratio 1, coefficient of variation 0, but
  // the sd ratio divides by zero.
  CHECK_THROWS_AS(nbc_features(s), DegenerateSample);
}

TEST_CASE("sample validation") {
  Matrix X(3, 2);
  X << 0, 0, 1, 1, 0, 0;
  CHECK_THROWS_AS(MinimizationSample(X, Vector::Zero(3)), DegenerateSample);
  X(2, 0) = NAN;
  CHECK_THROWS_AS(MinimizationSample(X, Vector::Zero(3)), NonFiniteInput);
  CHECK_THROWS_AS(MinimizationSample(Matrix::Zero(3, 2), Vector::Zero(4)), DimensionMismatch);
}

TEST_CASE("tiny samples report InsufficientData") {
  Matrix X(2, 1);
  X << 0, 1;
  Vector y(2);
  y << 0, 1;
  const MinimizationSample s(X, y);
  CHECK_THROWS_AS(information_content_features(s), InsufficientData);
  CHECK_THROWS_AS(meta_model_features(s), InsufficientData);
  CHECK_THROWS_AS(nbc_features(s), InsufficientData);
  CHECK_THROWS_AS(compute_all(s), InsufficientData);
}

TEST_CASE("compute_all enforces n >= 5d and names every failing family") {
  CHECK_THROWS_AS(compute_all(random_sample(49, 10, 1, sphere)), InsufficientData);
  // n = 5d passes the size gate; the 2% subset (1 point) and the interaction
  // model (55 terms) still fail and are both reported.
  try {
    compute_all(random_sample(50, 10, 1, sphere));
    FAIL("expected FeatureError");
  } catch (const FeatureError& e) {
    CHECK(e.failed("disp"));
    CHECK(e.failed("meta"));
    CHECK_FALSE(e.failed("distr"));
    CHECK_FALSE(e.failed("nbc"));
  }

  Matrix X = testutil::uniform_points(60, 2, 8);
  const MinimizationSample flat(X, Vector::Constant(60, 1.0));
  try {
    compute_all(flat);
    FAIL("expected FeatureError");
  } catch (const FeatureError& e) {
    CHECK(e.failed("distr"));
    CHECK(e.failed("ic"));
    CHECK(e.failed("meta"));
    CHECK_FALSE(e.failed("disp"));
  }
}

TEST_CASE("invariances") {
  const auto base = random_sample(150, 3, 12, rastrigin_like);
  IcSettings ic;
  ic.start = 5;
  const auto f = compute_all(base, ic);

  SUBCASE("translating y changes only the intercept") {
    const auto g = compute_all({base.X(), (base.y().array() + 7.5).matrix()}, ic);
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      if (feature_names()[i] == "lin_simple.intercept") {
        CHECK(g.values[i] == doctest::Approx(f.values[i] + 7.5));
      } else if (i >= 7 && i <= 9) {
        // epsilon thresholds see only slopes, which are unchanged
        CHECK(g.values[i] == f.values[i]);
      } else {
        CHECK(rel_close(g.values[i], f.values[i], 1e-9, 1e-12));
      }
    }
  }

  SUBCASE("positive scaling of y") {
    const double c = 1000.0;
    const auto g = compute_all({base.X(), base.y() * c}, ic);
    for (const auto name : {"disp.diff_mean_02", "distr.skewness", "distr.kurtosis",
                            "lin_simple.adj_r2", "quad_simple.adj_r2",
                            "nbc.nn_nb.sd_ratio", "nbc.nb_fitness.cor", "ic.m0"})
      CHECK(rel_close(g[name], f[name], 1e-9, 1e-12));
    // The threshold grid is absolute, so the ic epsilons move by about log10(c)
    // up to grid resolution (20 decades over 999 steps).
    CHECK(std::abs(g["ic.eps.s"] - f["ic.eps.s"] - 3.0) <= 20.0 / 999 + 1e-9);
  }

  SUBCASE("translating X leaves every feature but the intercept close") {
    Matrix X = base.X();
    X.rowwise() += Eigen::RowVector3d(0.5, -1.0, 2.0);
    const auto g = compute_all({X, base.y()}, ic);
    for (std::size_t i = 0; i < kNumFeatures; ++i)
      if (feature_names()[i] != "lin_simple.intercept")
        CHECK(rel_close(g.values[i], f.values[i], 1e-7, 1e-9));
  }
}

TEST_CASE("meta models on analytic responses") {
  const Matrix X = testutil::uniform_points(200, 3, 21);
  Vector lin = (3.0 + (X * Eigen::Vector3d(1.0, -2.0, 0.5)).array()).matrix();
  const auto exact = meta_model_features({X, lin});
  CHECK(exact.lin_simple_adj_r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(exact.lin_simple_intercept == doctest::Approx(3.0).epsilon(1e-10));

  const auto s = random_sample(200, 3, 22, sphere);
  const auto f = compute_all(s);
  CHECK(f["quad_simple.adj_r2"] >= 0.999);
  CHECK(f["distr.skewness"] > 0.0);
}

TEST_CASE("pure noise has near-zero linear fit") {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix X = testutil::uniform_points(500, 5, seed);
    const Vector y = testutil::normal_values(500, seed + 1000);
    worst = std::max(worst, std::abs(meta_model_features({X, y}).lin_simple_adj_r2));
  }
  CHECK(worst < 0.05);
}

TEST_CASE("least squares errors") {
  Matrix terms(10, 2);
  terms.col(0) = Vector::LinSpaced(10, 0, 1);
  terms.col(1) = 2 * terms.col(0);
  CHECK_THROWS_AS(fit_least_squares(terms, Vector::LinSpaced(10, 0, 3)), SingularFit);
  CHECK_THROWS_AS(fit_least_squares(terms.topRows(3), Vector::LinSpaced(3, 0, 3)), InsufficientData);
  CHECK_THROWS_AS(fit_least_squares(terms.leftCols(1), Vector::Constant(10, 1.0)), DegenerateSample);
}

TEST_CASE("default epsilon grid") {
  const auto grid = default_epsilon_grid();
  REQUIRE(grid.size() == 1001);
  CHECK(grid[0] == 0.0);
  CHECK(grid[1] == doctest::Approx(1e-5));
  CHECK(grid.back() == doctest::Approx(1e15));
  CHECK(std::is_sorted(grid.begin(), grid.end()));
}
