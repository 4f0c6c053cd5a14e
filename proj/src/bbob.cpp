#include "nasela/bbob.hpp"

#include "nasela/errors.hpp"
#include "nasela/parallel.hpp"
#include "nasela/rng.hpp"
#include "nasela/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace nasela::bbob {

namespace {

constexpr double kPi = std::numbers::pi;

enum Stream : std::uint64_t { kXopt = 1, kFopt, kRotR, kRotQ, kSigns, kPeaks };

std::uint64_t instance_seed(int fid, int instance, Stream stream) {
  const auto key = (static_cast<std::uint64_t>(fid) << 40) ^ static_cast<std::uint64_t>(instance);
  return derive_seed(derive_seed(0x6262'6f62ULL, key), stream);
}

double sq(double v) { return v * v; }

double rastrigin_part(const Vector& z) {
  return 10.0 * (static_cast<double>(z.size()) - (2.0 * kPi * z.array()).cos().sum());
}

double rosenbrock_sum(const Vector& z) {
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < z.size(); ++i)
    s += 100.0 * sq(z(i) * z(i) - z(i + 1)) + sq(z(i) - 1.0);
  return s;
}

/// Exponent i / (D - 1) for 0-based coordinate i.
double frac(Eigen::Index i, Eigen::Index d) {
  return static_cast<double>(i) / static_cast<double>(d - 1);
}

Vector random_signs(Rng& rng, Eigen::Index d) {
  Vector s(d);
  for (Eigen::Index i = 0; i < d; ++i) s(i) = rng.uniform() < 0.5 ? -1.0 : 1.0;
  return s;
}

double rosenbrock_scale(Eigen::Index d) {
  return std::max(1.0, std::sqrt(static_cast<double>(d)) / 8.0);
}

} // namespace

std::string function_name(int fid) {
  static const char* names[] = {"Sphere",
                                "Separable Ellipsoidal",
                                "Rastrigin",
                                "Bueche-Rastrigin",
                                "Linear Slope",
                                "Attractive Sector",
                                "Step Ellipsoidal",
                                "Rosenbrock",
                                "Rotated Rosenbrock",
                                "Ellipsoidal",
                                "Discus",
                                "Bent Cigar",
                                "Sharp Ridge",
                                "Different Powers",
                                "Rotated Rastrigin",
                                "Weierstrass",
                                "Schaffers F7",
                                "Ill-conditioned Schaffers F7",
                                "Composite Griewank-Rosenbrock",
                                "Schwefel",
                                "Gallagher 101 Peaks",
                                "Gallagher 21 Peaks",
                                "Katsuura",
                                "Lunacek bi-Rastrigin"};
  if (fid < 1 || fid > kNumFunctions) throw UnknownFunction("no BBOB function f" + std::to_string(fid));
  return names[fid - 1];
}

Matrix random_rotation(Eigen::Index dim, std::uint64_t seed) {
  Rng rng(seed);
  Matrix g(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Vector t_osz(const Vector& x) {
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = x(i);
    if (v == 0.0) {
      out(i) = 0.0;
      continue;
    }
    const double h = std::log(std::abs(v));
    const double c1 = v > 0 ? 10.0 : 5.5;
    const double c2 = v > 0 ? 7.9 : 3.1;
    out(i) = std::copysign(std::exp(h + 0.049 * (std::sin(c1 * h) + std::sin(c2 * h))), v);
  }
  return out;
}

Vector t_asy(const Vector& x, double beta) {
  const Eigen::Index d = x.size();
  Vector out = x;
  for (Eigen::Index i = 0; i < d; ++i)
    if (x(i) > 0.0) out(i) = std::pow(x(i), 1.0 + beta * frac(i, d) * std::sqrt(x(i)));
  return out;
}

Vector lambda_diagonal(Eigen::Index dim, double alpha) {
  Vector out(dim);
  for (Eigen::Index i = 0; i < dim; ++i) out(i) = std::pow(alpha, 0.5 * frac(i, dim));
  return out;
}

double f_pen(const Vector& x) {
  return (x.array().abs() - 5.0).max(0.0).square().sum();
}

Instance make_instance(int fid, int instance, Eigen::Index dim) {
  if (fid < 1 || fid > kNumFunctions) throw UnknownFunction("no BBOB function f" + std::to_string(fid));
  if (dim < 2) throw InvalidArgument("BBOB dimension must be >= 2");
  if (instance < 1) throw InvalidArgument("BBOB instance ids start at 1");

  Instance inst;
  inst.fid_ = fid;
  inst.instance_ = instance;
  inst.dim_ = dim;

  Rng xrng(instance_seed(fid, instance, kXopt));
  inst.x_opt_.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) inst.x_opt_(i) = xrng.uniform(-4.0, 4.0);
  Rng frng(instance_seed(fid, instance, kFopt));
  inst.f_opt_ = frng.uniform(-1000.0, 1000.0);

  const auto dim_key = static_cast<std::uint64_t>(dim);
  inst.R_ = random_rotation(dim, derive_seed(instance_seed(fid, instance, kRotR), dim_key));
  inst.Q_ = random_rotation(dim, derive_seed(instance_seed(fid, instance, kRotQ), dim_key));
  Rng srng(instance_seed(fid, instance, kSigns));
  inst.signs_ = random_signs(srng, dim);

  switch (fid) {
  case 4:
    for (Eigen::Index i = 0; i < dim; i += 2) inst.x_opt_(i) = std::abs(inst.x_opt_(i));
    break;
  case 5:
    inst.x_opt_ = 5.0 * inst.signs_;
    break;
  case 8:
    inst.x_opt_ *= 0.75;
    break;
  case 9:
  case 19:
    inst.x_opt_ = inst.R_.transpose() * Vector::Constant(dim, 0.5 / rosenbrock_scale(dim));
    break;
  case 20:
    inst.x_opt_ = 0.5 * 4.2096874633 * inst.signs_;
    break;
  case 21:
  case 22: {
    const bool many = fid == 21;
    const Eigen::Index num_peaks = many ? 101 : 21;
    const double spread = many ? 5.0 : 4.9;
    const double best_spread = many ? 4.0 : 3.92;
    Rng prng(derive_seed(instance_seed(fid, instance, kPeaks), dim_key));
    Peaks& p = inst.peaks_;
    p.centers.resize(num_peaks, dim);
    p.weights.resize(num_peaks);
    p.conditioning.resize(num_peaks, dim);
    for (Eigen::Index k = 0; k < num_peaks; ++k) {
      const double s = k == 0 ? best_spread : spread;
      for (Eigen::Index i = 0; i < dim; ++i) p.centers(k, i) = prng.uniform(-s, s);
      p.weights(k) = k == 0 ? 10.0
                            : 1.1 + 8.0 * static_cast<double>(k - 1) / static_cast<double>(num_peaks - 2);
    }
    // Condition numbers for peaks 2.. are a random permutation of the pool.
    const Eigen::Index pool_size = num_peaks - 1;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(pool_size));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    prng.shuffle(std::span(order));
    std::vector<Eigen::Index> axes(static_cast<std::size_t>(dim));
    for (Eigen::Index k = 0; k < num_peaks; ++k) {
      const double alpha =
          k == 0 ? (many ? 1000.0 : 1.0e6)
                 : std::pow(1000.0, 2.0 * static_cast<double>(order[static_cast<std::size_t>(k - 1)]) /
                                        static_cast<double>(pool_size - 1));
      const Vector diag = lambda_diagonal(dim, alpha) / std::pow(alpha, 0.25);
      std::iota(axes.begin(), axes.end(), Eigen::Index{0});
      prng.shuffle(std::span(axes));
      for (Eigen::Index i = 0; i < dim; ++i) p.conditioning(k, i) = diag(axes[static_cast<std::size_t>(i)]);
    }
    inst.x_opt_ = p.centers.row(0).transpose();
    break;
  }
  case 24:
    inst.x_opt_ = 1.25 * inst.signs_;
    break;
  default:
    break;
  }
  return inst;
}

double Instance::operator()(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != dim_)
    throw DimensionMismatch("point has dimension " + std::to_string(x.size()) + ", instance has " +
                            std::to_string(dim_));
  if (!x.allFinite()) throw NonFiniteInput("BBOB evaluation at a non-finite point");
  return raw(x) + f_opt_;
}

Vector Instance::evaluate_rows(const Matrix& X) const {
  Vector out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = (*this)(X.row(i).transpose());
  return out;
}

double Instance::raw(const Vector& x) const {
  const Eigen::Index d = dim_;
  const double D = static_cast<double>(d);
  const Vector shifted = x - x_opt_;

  switch (fid_) {
  case 1:
    return shifted.squaredNorm();

  case 2: {
    const Vector z = t_osz(shifted);
    double s = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) s += std::pow(10.0, 6.0 * frac(i, d)) * z(i) * z(i);
    return s;
  }

  case 3: {
    const Vector z = lambda_diagonal(d, 10.0).cwiseProduct(t_asy(t_osz(shifted), 0.2));
    return rastrigin_part(z) + z.squaredNorm();
  }

  case 4: {
    Vector z = t_osz(shifted);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double s = std::pow(10.0, 0.5 * frac(i, d));
      z(i) *= (z(i) > 0.0 && i % 2 == 0) ? 10.0 * s : s;
    }
    return rastrigin_part(z) + z.squaredNorm() + 100.0 * f_pen(x);
  }

  case 5: {
    double s = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double slope = std::copysign(std::pow(10.0, frac(i, d)), x_opt_(i));
      const double z = x_opt_(i) * x(i) < 25.0 ? x(i) : x_opt_(i);
      s += 5.0 * std::abs(slope) - slope * z;
    }
    return s;
  }

  case 6: {
    const Vector z = Q_ * lambda_diagonal(d, 10.0).asDiagonal() * (R_ * shifted);
    double s = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double w = z(i) * x_opt_(i) > 0.0 ? 100.0 : 1.0;
      s += sq(w * z(i));
    }
    return std::pow(t_osz(Vector::Constant(1, s))(0), 0.9);
  }

  case 7: {
    const Vector zhat = lambda_diagonal(d, 10.0).asDiagonal() * (R_ * shifted);
    Vector ztilde(d);
    for (Eigen::Index i = 0; i < d; ++i)
      ztilde(i) = std::abs(zhat(i)) > 0.5 ? std::floor(0.5 + zhat(i))
                                          : std::floor(0.5 + 10.0 * zhat(i)) / 10.0;
    const Vector z = Q_ * ztilde;
    double s = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) s += std::pow(10.0, 2.0 * frac(i, d)) * z(i) * z(i);
    return 0.1 * std::max(std::abs(zhat(0)) / 1.0e4, s) + f_pen(x);
  }

  case 8: {
    const Vector z = (rosenbrock_scale(d) * shifted).array() + 1.0;
    return rosenbrock_sum(z);
  }

  case 9: {
    const Vector z = (rosenbrock_scale(d) * (R_ * x)).array() + 0.5;
    return rosenbrock_sum(z);
  }

  case 10: {
    const Vector z = t_osz(R_ * shifted);
    double s = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) s += std::pow(10.0, 6.0 * frac(i, d)) * z(i) * z(i);
    return s;
  }

  case 11: {
    const Vector z = t_osz(R_ * shifted);
    return 1.0e6 * z(0) * z(0) + z.tail(d - 1).squaredNorm();
  }

  case 12: {
    const Vector z = R_ * t_asy(R_ * shifted, 0.5);
    return z(0) * z(0) + 1.0e6 * z.tail(d - 1).squaredNorm();
  }

  case 13: {
    const Vector z = Q_ * lambda_diagonal(d, 10.0).asDiagonal() * (R_ * shifted);
    return z(0) * z(0) + 100.0 * z.tail(d - 1).norm();
  }

  case 14: {
    const Vector z = R_ * shifted;
    double s = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) s += std::pow(std::abs(z(i)), 2.0 + 4.0 * frac(i, d));
    return std::sqrt(s);
  }

  case 15: {
    const Vector z = R_ * (lambda_diagonal(d, 10.0).asDiagonal() *
                           (Q_ * t_asy(t_osz(R_ * shifted), 0.2)));
    return rastrigin_part(z) + z.squaredNorm();
  }

  case 16: {
    const Vector z = R_ * (lambda_diagonal(d, 0.01).asDiagonal() * (Q_ * t_osz(R_ * shifted)));
    double f0 = 0.0;
    for (int k = 0; k < 12; ++k) f0 += std::pow(0.5, k) * std::cos(2.0 * kPi * std::pow(3.0, k) * 0.5);
    double s = 0.0;
    for (Eigen::Index i = 0; i < d; ++i)
      for (int k = 0; k < 12; ++k)
        s += std::pow(0.5, k) * std::cos(2.0 * kPi * std::pow(3.0, k) * (z(i) + 0.5));
    return 10.0 * std::pow(s / D - f0, 3.0) + 10.0 / D * f_pen(x);
  }

  case 17:
  case 18: {
    const double alpha = fid_ == 17 ? 10.0 : 1000.0;
    const Vector z = lambda_diagonal(d, alpha).asDiagonal() * (Q_ * t_asy(R_ * shifted, 0.5));
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < d; ++i) {
      const double si = std::sqrt(z(i) * z(i) + z(i + 1) * z(i + 1));
      const double root = std::sqrt(si);
      s += root + root * sq(std::sin(50.0 * std::pow(si, 0.2)));
    }
    return sq(s / (D - 1.0)) + 10.0 * f_pen(x);
  }

  case 19: {
    const Vector z = (rosenbrock_scale(d) * (R_ * x)).array() + 0.5;
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < d; ++i) {
      const double si = 100.0 * sq(z(i) * z(i) - z(i + 1)) + sq(z(i) - 1.0);
      s += si / 4000.0 - std::cos(si);
    }
    return 10.0 / (D - 1.0) * s + 10.0;
  }

  case 20: {
    const Vector xhat = 2.0 * signs_.cwiseProduct(x);
    const Vector two_abs_opt = 2.0 * x_opt_.cwiseAbs();
    Vector zhat = xhat;
    for (Eigen::Index i = 1; i < d; ++i) zhat(i) = xhat(i) + 0.25 * (xhat(i - 1) - two_abs_opt(i - 1));
    const Vector z =
        100.0 * (lambda_diagonal(d, 10.0).cwiseProduct(zhat - two_abs_opt) + two_abs_opt);
    double s = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) s += z(i) * std::sin(std::sqrt(std::abs(z(i))));
    return -s / (100.0 * D) + 4.189828872724339 + 100.0 * f_pen(z / 100.0);
  }

  case 21:
  case 22: {
    double best = 0.0;
    for (Eigen::Index k = 0; k < peaks_.centers.rows(); ++k) {
      const Vector v = R_ * (x - peaks_.centers.row(k).transpose());
      const double q = peaks_.conditioning.row(k).dot(v.cwiseProduct(v).transpose());
      best = std::max(best, peaks_.weights(k) * std::exp(-q / (2.0 * D)));
    }
    return sq(t_osz(Vector::Constant(1, 10.0 - best))(0)) + f_pen(x);
  }

  case 23: {
    const Vector z = Q_ * (lambda_diagonal(d, 100.0).asDiagonal() * (R_ * shifted));
    const double exponent = 10.0 / std::pow(D, 1.2);
    double prod = 1.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      double s = 0.0;
      for (int j = 1; j <= 32; ++j) {
        const double p = std::ldexp(1.0, j);
        s += std::abs(p * z(i) - std::nearbyint(p * z(i))) / p;
      }
      prod *= std::pow(1.0 + static_cast<double>(i + 1) * s, exponent);
    }
    return 10.0 / (D * D) * prod - 10.0 / (D * D) + f_pen(x);
  }

  case 24: {
    constexpr double mu0 = 2.5;
    constexpr double depth = 1.0;
    const double s = 1.0 - 1.0 / (2.0 * std::sqrt(D + 20.0) - 8.2);
    const double mu1 = -std::sqrt((mu0 * mu0 - depth) / s);
    const Vector xhat = 2.0 * signs_.cwiseProduct(x);
    const Vector z = Q_ * (lambda_diagonal(d, 100.0).asDiagonal() * (R_ * (xhat.array() - mu0).matrix()));
    const double sphere0 = (xhat.array() - mu0).square().sum();
    const double sphere1 = depth * D + s * (xhat.array() - mu1).square().sum();
    return std::min(sphere0, sphere1) + rastrigin_part(z) + 1.0e4 * f_pen(x);
  }

  default:
    throw UnknownFunction("no BBOB function f" + std::to_string(fid_));
  }
}

Matrix table_sample(const FeatureTableSettings& settings, int fid, int instance) {
  const auto cell = (static_cast<std::uint64_t>(fid) << 32) | static_cast<std::uint64_t>(instance);
  return lhs_sample({DesignSpace::box(static_cast<std::size_t>(settings.dim), -5.0, 5.0), settings.n,
                     derive_seed(settings.seed, cell)});
}

std::vector<FeatureRow> feature_table(const FeatureTableSettings& settings) {
  std::vector<int> fids = settings.fids;
  if (fids.empty()) {
    fids.resize(kNumFunctions);
    std::iota(fids.begin(), fids.end(), 1);
  }
  for (const int fid : fids) function_name(fid);
  if (settings.instances < 1) throw InvalidArgument("need at least one instance");

  std::vector<std::pair<int, int>> cells;
  for (const int fid : fids)
    for (int i = 1; i <= settings.instances; ++i) cells.emplace_back(fid, i);

  std::vector<FeatureRow> rows(cells.size());
  parallel_for(cells.size(), settings.threads, [&](std::size_t k) {
    const auto [fid, instance] = cells[k];
    const std::string where = "bbob f" + std::to_string(fid) + " instance " + std::to_string(instance);
    try {
      const Instance inst = make_instance(fid, instance, settings.dim);
      const Matrix X = table_sample(settings, fid, instance);
      const Vector y = inst.evaluate_rows(X);
      IcSettings ic;
      ic.seed = derive_seed(settings.seed, ((static_cast<std::uint64_t>(fid) << 32) | static_cast<std::uint64_t>(instance)) ^ 0x1c'0000'0000'0000ULL);
      rows[k] = {fid, instance, compute_all(MinimizationSample(X, y), ic)};
    } catch (const FeatureError& e) {
      auto failures = e.failures();
      for (auto& f : failures) f.message = where + ": " + f.message;
      throw FeatureError(std::move(failures));
    } catch (const Error& e) {
      throw Error(e.kind(), where + ": " + e.what());
    }
  });
  return rows;
}

} // namespace nasela::bbob
