#include "kinexch/analysis.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>

#include "kinexch/errors.hpp"

namespace kinexch::analysis {
namespace {

__extension__ using int128 = __int128;

double at(std::span<const double> v, std::size_t n) { return n < v.size() ? v[n] : 0.0; }

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("least squares: abscissae are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += e * e;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

// p_n / w_n with the underflow convention shared by the weighted norms.
double weighted_ratio(double p, double w, std::size_t n) {
  if (w > 0.0) return p / w;
  if (std::abs(p) < DBL_MIN) return 0.0;
  throw InvalidArgument("weighted norm: reference pmf vanishes at n = " + std::to_string(n) +
                        " where the argument does not");
}

}  // namespace

double gini_samples(std::span<const Dollars> wealth) {
  const std::size_t n = wealth.size();
  if (n < 2) throw InvalidArgument("gini_samples needs at least two agents");
  std::vector<Dollars> sorted(wealth.begin(), wealth.end());
  std::sort(sorted.begin(), sorted.end());
  // sum_{i,j} |x_i - x_j| = 2 sum_k (2k - n + 1) x_(k), exact in integers.
  int128 acc = 0;
  int128 total = 0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += static_cast<int128>(2 * static_cast<std::int64_t>(k) - static_cast<std::int64_t>(n) + 1) *
           sorted[k];
    total += sorted[k];
  }
  if (total == 0) throw InvalidArgument("gini_samples: zero total wealth (mu = 0)");
  // 2 acc / (2 N^2 mu) = acc / (N * total)
  return static_cast<double>(acc) / (static_cast<double>(n) * static_cast<double>(total));
}

double gini_samples(const WealthVector& state) { return gini_samples(state.values()); }

double gini_pmf(std::span<const double> p) {
  double mean = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) mean += static_cast<double>(n) * p[n];
  if (!(mean > 0.0)) throw InvalidArgument("gini_pmf: mean must be > 0");
  // sum_{i,j} |i-j| p_i p_j = 2 sum_j p_j (j F_j - M_j), F_j = sum_{i<j} p_i, M_j = sum_{i<j} i p_i
  double mass_below = 0.0, moment_below = 0.0, acc = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double jd = static_cast<double>(j);
    acc += p[j] * (jd * mass_below - moment_below);
    mass_below += p[j];
    moment_below += jd * p[j];
  }
  return acc / mean;
}

double gini_pmf(const Pmf& p) { return gini_pmf(p.probs()); }

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h += v * std::log(v);
  }
  return h;
}

KlDivergence kl_divergence(std::span<const double> p, std::span<const double> q) {
  KlDivergence out;
  const std::size_t n = std::max(p.size(), q.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double pi = at(p, i);
    if (!(pi > 0.0)) continue;
    const double qi = at(q, i);
    if (!(qi > 0.0)) {
      out.support_ok = false;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    out.value += pi * std::log(pi / qi);
  }
  return out;
}

double h0_inner(std::span<const double> p, std::span<const double> q, std::span<const double> pstar) {
  const std::size_t n = std::max({p.size(), q.size()});
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double num = at(p, i) * at(q, i);
    const double w = at(pstar, i);
    if (w > 0.0) {
      acc += num / w;
    } else if (std::abs(num) >= DBL_MIN) {
      throw InvalidArgument("h0_inner: pstar vanishes at n = " + std::to_string(i));
    }
  }
  return acc;
}

double h0_distance(std::span<const double> p, std::span<const double> q, std::span<const double> pstar) {
  const std::size_t n = std::max(p.size(), q.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = at(p, i) - at(q, i);
    const double w = at(pstar, i);
    if (w > 0.0) {
      acc += d * d / w;
    } else if (std::abs(d) >= DBL_MIN) {
      throw InvalidArgument("h0_distance: pstar vanishes at n = " + std::to_string(i) +
                            " where the arguments differ");
    }
  }
  return std::sqrt(acc);
}

double h1_norm(std::span<const double> p, std::span<const double> pstar) {
  // Sum over n = 0..size-1 with p beyond the truncation treated as zero.
  double acc = 0.0;
  double u = weighted_ratio(at(p, 0), at(pstar, 0), 0);
  for (std::size_t n = 0; n < p.size(); ++n) {
    const double w = at(pstar, n);
    const double u_next = n + 1 < p.size() ? weighted_ratio(p[n + 1], at(pstar, n + 1), n + 1) : 0.0;
    const double d = u_next - u;
    if (w > 0.0) acc += w * d * d;
    u = u_next;
  }
  return std::sqrt(acc);
}

double l1_distance(std::span<const double> p, std::span<const double> q) {
  const std::size_t n = std::max(p.size(), q.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::abs(at(p, i) - at(q, i));
  return acc;
}

WaveFit wave_decompose(std::span<const double> p) {
  if (p.empty()) throw InvalidArgument("wave_decompose: empty pmf");
  WaveFit fit;
  const std::size_t size = p.size();
  const double peak = *std::max_element(p.begin(), p.end());
  const double floor = 1e-8 * peak;

  // Rightmost local maximum away from zero.
  std::size_t mode = 0;
  for (std::size_t m = size - 1; m >= 1; --m) {
    const double left = p[m - 1];
    const double right = at(p, m + 1);
    if (p[m] > floor && p[m] >= left && p[m] >= right) {
      mode = m;
      break;
    }
  }

  fit.n_cut = 1;
  if (mode >= 2) {
    std::size_t arg = 1;
    for (std::size_t n = 2; n < mode; ++n) {
      if (p[n] < p[arg]) arg = n;
    }
    fit.n_cut = arg;
  }

  double mass = 0.0, first = 0.0;
  for (std::size_t n = fit.n_cut; n < size; ++n) {
    mass += p[n];
    first += static_cast<double>(n) * p[n];
  }
  fit.r = mass;
  if (mass < 1e-6) {
    fit.degenerate = true;
    fit.reason = "wave mass below 1e-6";
    fit.residual = l1_distance(p, wave_profile(fit, size - 1));
    return fit;
  }
  fit.c = first / mass;
  double second = 0.0;
  for (std::size_t n = fit.n_cut; n < size; ++n) {
    const double d = static_cast<double>(n) - fit.c;
    second += d * d * p[n];
  }
  fit.sigma = std::sqrt(second / mass);
  if (!(fit.sigma > 0.0)) {
    fit.degenerate = true;
    fit.reason = "wave has zero width";
  }
  fit.residual = l1_distance(p, wave_profile(fit, size - 1));
  return fit;
}

std::vector<double> wave_profile(const WaveFit& fit, std::size_t n_max) {
  std::vector<double> out(n_max + 1, 0.0);
  out[0] = 1.0 - fit.r;
  if (fit.sigma > 0.0) {
    const double norm = fit.r / (fit.sigma * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t n = 0; n <= n_max; ++n) {
      const double z = (static_cast<double>(n) - fit.c) / fit.sigma;
      out[n] += norm * std::exp(-0.5 * z * z);
    }
  } else if (fit.r > 0.0) {
    const auto n = static_cast<std::size_t>(std::llround(fit.c));
    if (n <= n_max) out[n] += fit.r;
  }
  return out;
}

PowerLawFit fit_power_law(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size()) throw InvalidArgument("fit_power_law: size mismatch");
  if (times.size() < 5) throw InvalidArgument("fit_power_law: need at least 5 points");
  std::vector<double> lx(times.size()), ly(values.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0) || !(values[i] > 0.0)) {
      throw InvalidArgument("fit_power_law: times and values must be positive");
    }
    lx[i] = std::log(times[i]);
    ly[i] = std::log(values[i]);
  }
  const LineFit line = least_squares(lx, ly);
  return {std::exp(line.intercept), line.slope, line.r_squared};
}

ExponentialFit fit_exponential_decay(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size()) throw InvalidArgument("fit_exponential_decay: size mismatch");
  if (times.size() < 3) throw InvalidArgument("fit_exponential_decay: need at least 3 points");
  std::vector<double> ly(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw InvalidArgument("fit_exponential_decay: values must be positive");
    ly[i] = std::log(values[i]);
  }
  const LineFit line = least_squares(times, ly);
  return {std::exp(line.intercept), -line.slope, line.r_squared};
}

double gini_wave_approx(double mu, double c, double sigma) {
  if (!(c > 0.0)) throw InvalidArgument("gini_wave_approx: c must be > 0");
  return 1.0 - mu / c + mu * sigma / (std::sqrt(std::numbers::pi) * c * c);
}

}  // namespace kinexch::analysis
