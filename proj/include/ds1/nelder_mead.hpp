#pragma once

// Nelder-Mead simplex minimizer (standard coefficients: reflection 1,
// expansion 2, contraction 1/2, shrink 1/2).

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace ds1 {

struct NelderMeadOptions {
  double f_tol = 1e-14;  // spread of objective values over the simplex
  double x_tol = 1e-12;  // simplex diameter relative to max(1, |x|)
  int max_evals = 20000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int evaluations = 0;
  bool converged = false;
};

inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, const std::vector<double>& step,
                                    const NelderMeadOptions& opt = {}) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> s(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) s[i + 1][i] += step[i];
  std::vector<double> fv(n + 1);
  int evals = 0;
  const auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? HUGE_VAL : v;
  };
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(s[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  const auto point = [&](double t, std::vector<double>& out) {
    // centroid + t (centroid - worst)
    for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + t * (centroid[j] - s[order[n]][j]);
  };

  NelderMeadResult res;
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order[0], worst = order[n], second = order[n - 1];

    double diameter = 0.0, scale = 1.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        diameter = std::max(diameter, std::abs(s[i][j] - s[best][j]));
        scale = std::max(scale, std::abs(s[best][j]));
      }
    if (std::abs(fv[worst] - fv[best]) <= opt.f_tol * std::max(1.0, std::abs(fv[best])) &&
        diameter <= opt.x_tol * scale) {
      res.converged = true;
      break;
    }
    if (evals >= opt.max_evals) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += s[order[i]][j] / static_cast<double>(n);

    point(1.0, trial);
    const double fr = eval(trial);
    if (fr < fv[best]) {
      point(2.0, trial2);
      const double fe = eval(trial2);
      if (fe < fr) {
        s[worst] = trial2;
        fv[worst] = fe;
      } else {
        s[worst] = trial;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      s[worst] = trial;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    point(outside ? 0.5 : -0.5, trial2);
    const double fc = eval(trial2);
    if (fc < (outside ? fr : fv[worst])) {
      s[worst] = trial2;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      auto& x = s[order[i]];
      for (std::size_t j = 0; j < n; ++j) x[j] = s[best][j] + 0.5 * (x[j] - s[best][j]);
      fv[order[i]] = eval(x);
    }
  }
  const std::size_t best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  res.x = s[best];
  res.f = fv[best];
  res.evaluations = evals;
  return res;
}

}  // namespace ds1
