#include "lossguard/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lossguard/errors.hpp"

namespace lossguard {

namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

void TransponderParams::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be finite and non-negative");
  if (!(d >= 0.0) || !std::isfinite(d)) throw DomainError("d must be finite and non-negative");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError("nu must be positive");
  if (n < 1) throw DomainError("n must be at least 1");
  check_probability(eta, "eta");
  check_probability(p_one, "p_one");
  check_probability(p_spg, "p_spg");
}

}  // namespace lossguard

namespace lossguard::analytics {

namespace {

// ln(4 - 3 exp(-x)) without cancellation for small x.
double log_four_minus_three_exp(double x) { return std::log1p(-3.0 * std::expm1(-x)); }

}  // namespace

double survival_prob(double alpha, double d) {
  if (!(alpha >= 0.0) || !(d >= 0.0)) throw DomainError("survival_prob needs alpha >= 0 and d >= 0");
  return std::exp(-alpha * d);
}

double p_f(double p) {
  check_probability(p, "p");
  const double p3 = p * p * p;
  return p3 * p + 4.0 * p3 * (1.0 - p);
}

double alpha_prime(double alpha, double d) {
  if (!(alpha > 0.0) || !(d > 0.0)) throw DomainError("alpha_prime needs alpha > 0 and d > 0");
  return 3.0 * alpha - log_four_minus_three_exp(alpha * d) / d;
}

double f(double x) {
  if (!(x > 0.0)) throw DomainError("f(x) needs x > 0");
  // ln(4 - 3e^-x) = 3x - 6x^2 + 14x^3 - ..., so f = 3x - 7x^2 + O(x^3).
  if (x < 1e-6) return x * (3.0 - 7.0 * x);
  return 1.5 - log_four_minus_three_exp(x) / (2.0 * x);
}

double gate_success(int n) {
  if (n < 1) throw DomainError("gate_success needs n >= 1");
  const double q = static_cast<double>(n) / (static_cast<double>(n) + 1.0);
  return q * q;
}

double r(double x, double p_t) {
  if (!(x > 0.0)) throw DomainError("r needs x > 0");
  if (!(p_t > 0.0 && p_t <= 1.0)) throw DomainError("r needs p_t in (0, 1]");
  return f(x) - std::log(p_t) / (2.0 * x);
}

double p_t_aggregate(int n) { return std::pow(gate_success(n), 8); }

double p_t_full(const TransponderParams& params) {
  if (params.n < 1) throw DomainError("p_t_full needs n >= 1");
  check_probability(params.eta, "eta");
  check_probability(params.p_one, "p_one");
  check_probability(params.p_spg, "p_spg");
  const double clicks = 10.0 + 32.0 * static_cast<double>(params.n);
  const double log_pt = 38.0 * std::log(params.p_one) + 16.0 * std::log(gate_success(params.n)) +
                        clicks * std::log(params.p_spg) + clicks * std::log(params.eta);
  return std::exp(log_pt);
}

namespace {

// Golden-section search on [lo, hi]. The bracket midpoint is compared with
// both endpoints so a minimum pinned at a boundary is reported there.
template <typename Objective>
RMinimum golden_section(Objective objective, double lo, double hi, double tolerance) {
  constexpr int kMaxIterations = 200;
  const double inv_phi = 1.0 / std::numbers::phi;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  for (int it = 0; it < kMaxIterations && (b - a) > tolerance; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  double best_x = 0.5 * (a + b);
  double best_v = objective(best_x);
  for (double cand : {a, b}) {
    const double v = objective(cand);
    if (v < best_v) {
      best_v = v;
      best_x = cand;
    }
  }
  return {best_x, best_v};
}

}  // namespace

RMinimum min_r_over_x(double p_t, double x_tolerance) {
  if (!(p_t > 0.0 && p_t <= 1.0)) throw DomainError("min_r_over_x needs p_t in (0, 1]");
  if (!(x_tolerance > 0.0)) throw DomainError("minimizer tolerance must be positive");
  return golden_section([p_t](double x) { return r(x, p_t); }, 1e-9, 10.0, x_tolerance);
}

double r_unity_contour(double x) {
  if (!(x > 0.0)) throw DomainError("r_unity_contour needs x > 0");
  return std::exp(-2.0 * x * (1.0 - f(x)));
}

ContourMinimum r_unity_contour_minimum(double lo, double hi) {
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("contour search needs 0 < lo < hi");
  const auto m = golden_section(r_unity_contour, lo, std::min(hi, std::log(3.0)), kMinimizerTolerance);
  return {m.x_star, m.r_star};
}

int threshold_n(double x_tolerance) {
  constexpr int kSearchLimit = 100000;
  for (int n = 1; n <= kSearchLimit; ++n) {
    if (min_r_over_x(p_t_aggregate(n), x_tolerance).r_star < 1.0) return n;
  }
  throw DomainError("no threshold found below n = 100000");
}

std::string to_string(ReductionLevel level) {
  switch (level) {
    case ReductionLevel::raw: return "raw";
    case ReductionLevel::i: return "i";
    case ReductionLevel::ii: return "ii";
    case ReductionLevel::iii: return "iii";
  }
  return "?";
}

ReductionLevel reduction_level_from_string(std::string_view text) {
  for (auto level : {ReductionLevel::raw, ReductionLevel::i, ReductionLevel::ii, ReductionLevel::iii}) {
    if (to_string(level) == text) return level;
  }
  throw DomainError("unknown reduction level '" + std::string(text) + "' (expected raw, i, ii or iii)");
}

ResourceCount resources(int n, ReductionLevel level) {
  if (n < 1) throw DomainError("resources needs n >= 1");
  // The recovery circuit as built: two photon guns for the ancillae, one QND
  // per rail, four CNOTs, four CZs, four Hadamards plus two corrections and
  // two detectors.
  ResourceCount c{2, 4, 4, 4, 6, 2, ReductionLevel::raw};
  if (level == ReductionLevel::raw) return c;

  c.spg += 2 * c.qnd;
  c.cnot += 2 * c.qnd;
  c.one_qubit += 2 * c.qnd;
  c.pd += 2 * c.qnd;
  c.qnd = 0;
  c.level = ReductionLevel::i;
  if (level == ReductionLevel::i) return c;

  c.cz += c.cnot;
  c.one_qubit += 2 * c.cnot;
  c.cnot = 0;
  c.level = ReductionLevel::ii;
  if (level == ReductionLevel::ii) return c;

  const std::int64_t nn = n;
  c.spg += c.cz * 2 * nn;
  c.pd += c.cz * 2 * (nn + 1);
  c.level = ReductionLevel::iii;
  return c;
}

double storage_time(double alpha, double nu) {
  if (!(alpha > 0.0) || !(nu > 0.0)) throw DomainError("storage_time needs alpha > 0 and nu > 0");
  return 1.0 / (2.0 * alpha * nu);
}

double improved_storage_time(double alpha, double nu, double r) {
  if (!(r > 0.0)) throw DomainError("improved_storage_time needs r > 0");
  return storage_time(alpha, nu) / r;
}

}  // namespace lossguard::analytics
