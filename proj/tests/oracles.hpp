#pragma once

// Brute-force reference implementations used only by the tests. They work on
// plain std::vector data with explicit loops and share no code with the
// library's feature path.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Points = std::vector<std::vector<double>>;
using Values = std::vector<double>;

inline double distance(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (long double)(a[k] - b[k]) * (a[k] - b[k]);
  return (double)std::sqrt(s);
}

/// Indices sorted by (y, index) using insertion sort.
inline std::vector<std::size_t> ranking(const Values& y) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < y.size(); ++i) {
    auto pos = order.begin();
    while (pos != order.end() && y[*pos] <= y[i]) ++pos;
    order.insert(pos, i);
  }
  return order;
}

inline double mean_distance(const Points& X, const std::vector<std::size_t>& idx) {
  long double s = 0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b)
      if (a < b) {
        s += distance(X[idx[a]], X[idx[b]]);
        ++pairs;
      }
  return (double)(s / pairs);
}

/// {diff, ratio} for the top `percent`% subset.
inline std::pair<double, double> dispersion(const Points& X, const Values& y, int percent) {
  const std::size_t n = X.size();
  const std::size_t top = (percent * n + 99) / 100;
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  auto order = ranking(y);
  order.resize(top);
  const double d_all = mean_distance(X, all);
  const double d_top = mean_distance(X, order);
  return {d_top - d_all, d_top / d_all};
}

inline std::pair<double, double> skew_kurt(const Values& y) {
  long double mean = 0;
  for (double v : y) mean += v;
  mean /= y.size();
  long double m2 = 0, m3 = 0, m4 = 0;
  for (double v : y) {
    const long double c = v - mean;
    m2 += c * c;
    m3 += c * c * c;
    m4 += c * c * c * c;
  }
  m2 /= y.size();
  m3 /= y.size();
  m4 /= y.size();
  return {(double)(m3 / std::pow(m2, 1.5L)), (double)(m4 / (m2 * m2) - 3)};
}

struct Ic {
  double h_max, eps_s, eps_max, eps_ratio, m0;
  std::vector<double> entropy;
};

inline Ic information_content(const Points& X, const Values& y, std::size_t start,
                              const std::vector<double>& grid) {
  const std::size_t n = X.size();
  std::vector<std::size_t> tour{start};
  std::vector<bool> used(n, false);
  used[start] = true;
  while (tour.size() < n) {
    std::size_t best = n;
    double bd = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double d = distance(X[tour.back()], X[j]);
      if (best == n || d < bd) {
        best = j;
        bd = d;
      }
    }
    used[best] = true;
    tour.push_back(best);
  }
  std::vector<double> slope;
  for (std::size_t i = 0; i + 1 < n; ++i)
    slope.push_back((y[tour[i + 1]] - y[tour[i]]) / distance(X[tour[i]], X[tour[i + 1]]));

  Ic out{};
  std::vector<double> partial;
  for (double eps : grid) {
    std::vector<int> sym;
    for (double s : slope) sym.push_back(std::abs(s) <= eps ? 0 : (s > 0 ? 1 : -1));
    std::map<std::pair<int, int>, int> hist;
    for (std::size_t i = 0; i + 1 < sym.size(); ++i) hist[{sym[i], sym[i + 1]}]++;
    double h = 0;
    for (const auto& [pair, count] : hist) {
      if (pair.first == pair.second) continue;
      const double p = double(count) / double(sym.size() - 1);
      h -= p * std::log(p) / std::log(6.0);
    }
    out.entropy.push_back(h);
    std::vector<int> collapsed;
    for (int s : sym)
      if (s != 0 && (collapsed.empty() || collapsed.back() != s)) collapsed.push_back(s);
    partial.push_back(double(collapsed.size()) / double(n - 1));
  }
  out.h_max = -1;
  for (std::size_t e = 0; e < grid.size(); ++e)
    if (out.entropy[e] > out.h_max) {
      out.h_max = out.entropy[e];
      out.eps_max = grid[e];
    }
  auto first_positive_below = [&](double threshold) {
    for (std::size_t e = 0; e < grid.size(); ++e)
      if (grid[e] > 0 && out.entropy[e] < threshold) return std::log10(grid[e]);
    throw std::runtime_error("never below threshold");
  };
  out.eps_s = first_positive_below(0.05);
  out.eps_ratio = first_positive_below(0.5 * out.h_max);
  for (std::size_t e = 0; e < grid.size(); ++e)
    if (grid[e] == 0) out.m0 = partial[e];
  return out;
}

/// Least squares through modified Gram-Schmidt (with one reorthogonalisation
/// pass) in long double. Returns {coefficients, R^2}.
inline std::pair<std::vector<long double>, double> least_squares(const std::vector<std::vector<double>>& cols,
                                                                 const Values& y) {
  const std::size_t n = y.size(), p = cols.size();
  std::vector<std::vector<long double>> q(p, std::vector<long double>(n));
  std::vector<std::vector<long double>> r(p, std::vector<long double>(p, 0));
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) q[j][i] = cols[j][i];
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        long double dot = 0;
        for (std::size_t i = 0; i < n; ++i) dot += q[k][i] * q[j][i];
        r[k][j] += dot;
        for (std::size_t i = 0; i < n; ++i) q[j][i] -= dot * q[k][i];
      }
    long double norm = 0;
    for (std::size_t i = 0; i < n; ++i) norm += q[j][i] * q[j][i];
    norm = std::sqrt(norm);
    r[j][j] = norm;
    for (std::size_t i = 0; i < n; ++i) q[j][i] /= norm;
  }
  std::vector<long double> qty(p, 0), beta(p, 0), resid(y.begin(), y.end());
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) qty[j] += q[j][i] * resid[i];
    for (std::size_t i = 0; i < n; ++i) resid[i] -= qty[j] * q[j][i];
  }
  for (std::size_t j = p; j-- > 0;) {
    long double s = qty[j];
    for (std::size_t k = j + 1; k < p; ++k) s -= r[j][k] * beta[k];
    beta[j] = s / r[j][j];
  }
  long double mean = 0, ss_res = 0, ss_tot = 0;
  for (double v : y) mean += v;
  mean /= n;
  for (std::size_t i = 0; i < n; ++i) {
    ss_res += resid[i] * resid[i];
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  return {beta, (double)(1 - ss_res / ss_tot)};
}

inline double adjusted(double r2, std::size_t n, std::size_t p) {
  return 1 - (1 - r2) * double(n - 1) / double(n - p - 1);
}

struct Meta {
  double lin_adj, lin_intercept, inter_adj, quad_adj;
};

inline Meta meta_models(const Points& X, const Values& y) {
  const std::size_t n = X.size(), d = X[0].size();
  std::vector<std::vector<double>> base{std::vector<double>(n, 1.0)};
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = X[i][j];
    base.push_back(c);
  }
  auto lin = least_squares(base, y);
  auto inter_cols = base;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a + 1; b < d; ++b) {
      std::vector<double> c(n);
      for (std::size_t i = 0; i < n; ++i) c[i] = X[i][a] * X[i][b];
      inter_cols.push_back(c);
    }
  auto quad_cols = base;
  for (std::size_t a = 0; a < d; ++a) {
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = X[i][a] * X[i][a];
    quad_cols.push_back(c);
  }
  Meta m{};
  m.lin_adj = adjusted(lin.second, n, d);
  m.lin_intercept = (double)lin.first[0];
  m.quad_adj = adjusted(least_squares(quad_cols, y).second, n, 2 * d);
  if (n > inter_cols.size()) m.inter_adj = adjusted(least_squares(inter_cols, y).second, n, inter_cols.size() - 1);
  else m.inter_adj = NAN;
  return m;
}

inline double mean(const Values& v) {
  long double s = 0;
  for (double x : v) s += x;
  return (double)(s / v.size());
}

inline double sd(const Values& v) {
  const double m = mean(v);
  long double s = 0;
  for (double x : v) s += (long double)(x - m) * (x - m);
  return (double)std::sqrt(s / (v.size() - 1));
}

inline double correlation(const Values& a, const Values& b) {
  const double ma = mean(a), mb = mean(b);
  long double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (long double)(a[i] - ma) * (b[i] - mb);
    saa += (long double)(a[i] - ma) * (a[i] - ma);
    sbb += (long double)(b[i] - mb) * (b[i] - mb);
  }
  return (double)(sab / std::sqrt(saa * sbb));
}

struct Nbc {
  double sd_ratio, mean_ratio, cor, coeff_var, fitness_cor;
};

inline Nbc nearest_better(const Points& X, const Values& y) {
  const std::size_t n = X.size();
  Values nn, nb, ratio, indegree(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double dnn = INFINITY, dnb = INFINITY;
    std::optional<std::size_t> who;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = distance(X[i], X[j]);
      dnn = std::min(dnn, d);
      if (y[j] < y[i] && (!who || d < dnb)) {
        dnb = d;
        who = j;
      }
    }
    if (!who) continue;
    indegree[*who] += 1;
    nn.push_back(dnn);
    nb.push_back(dnb);
    ratio.push_back(dnn / dnb);
  }
  return {sd(nn) / sd(nb), mean(nn) / mean(nb), correlation(nn, nb), sd(ratio) / mean(ratio),
          correlation(indegree, y)};
}

/// Pairwise-distance agglomeration used to cross-check complete linkage heights.
inline std::vector<double> complete_linkage_heights(const Points& X) {
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < X.size(); ++i) clusters.push_back({i});
  std::vector<double> heights;
  while (clusters.size() > 1) {
    double best = INFINITY;
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a < clusters.size(); ++a)
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        double worst = 0;
        for (auto i : clusters[a])
          for (auto j : clusters[b]) worst = std::max(worst, distance(X[i], X[j]));
        if (worst < best) {
          best = worst;
          ba = a;
          bb = b;
        }
      }
    clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
    clusters.erase(clusters.begin() + bb);
    heights.push_back(best);
  }
  return heights;
}

} // namespace oracle
