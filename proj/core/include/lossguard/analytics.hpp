#pragma once

// Closed-form performance model of a fiber line (or loop) with
// loss-correcting transponders every d km.
//
// Notation: alpha is the fiber attenuation coefficient (1/km), d the
// station spacing (km), x = alpha*d the normalized spacing, n the number of
// ancilla photon pairs per linear-optics two-qubit gate, and p_t the
// probability that every gate in one transponder succeeds.

#include <cstdint>
#include <string>
#include <string_view>

namespace lossguard {

struct TransponderParams {
  double alpha = 1.0 / 30.0;  // 1/km
  double d = 10.0;            // km
  int n = 56;
  double eta = 1.0;    // detector efficiency
  double p_one = 1.0;  // one-qubit gate success
  double p_spg = 1.0;  // single-photon gun success
  double nu = 2.0e5;   // signal speed in fiber, km/s

  double x() const { return alpha * d; }
  /// Throws DomainError on out-of-range fields. alpha = 0 and d = 0 are
  /// allowed (lossless line); operations that divide by them check again.
  void validate() const;
};

}  // namespace lossguard

namespace lossguard::analytics {

/// exp(-alpha*d): probability that one photon survives a segment.
double survival_prob(double alpha, double d);

/// Probability that at most one of four independent photons is lost:
/// p^4 + 4 p^3 (1 - p).
double p_f(double p);

/// Effective attenuation of the encoded pair: -ln(p_f)/d
/// = 3 alpha - ln(4 - 3 exp(-alpha d))/d.
double alpha_prime(double alpha, double d);

/// alpha' / (2 alpha) as a function of x = alpha d. f(ln 3) = 1, f -> 0 as
/// x -> 0, f -> 3/2 as x -> infinity.
double f(double x);

/// Success probability of one linear-optics CNOT/CZ with 2n ancillae:
/// (n/(n+1))^2.
double gate_success(int n);

/// Relative absorption coefficient with imperfect gates:
/// f(x) + ln(1/p_t) / (2x).
double r(double x, double p_t);

/// Eight two-qubit gates per transponder: gate_success(n)^8.
double p_t_aggregate(int n);

/// p_one^38 * gate_success(n)^16 * p_spg^(10+32n) * eta^(10+32n), evaluated
/// in the log domain.
double p_t_full(const TransponderParams& params);

struct RMinimum {
  double x_star;
  double r_star;
};

inline constexpr double kMinimizerTolerance = 1e-9;

/// Golden-section minimization of r(., p_t) over x in (1e-9, 10].
RMinimum min_r_over_x(double p_t, double x_tolerance = kMinimizerTolerance);

/// p_t on the r = 1 contour at spacing x: exp(-2x (1 - f(x))). Only
/// meaningful (<= 1) for x <= ln 3.
double r_unity_contour(double x);

struct ContourMinimum {
  double x;
  double p_t;
};

/// Lowest point of the r = 1 contour for x in [lo, min(hi, ln 3)].
ContourMinimum r_unity_contour_minimum(double lo = 1e-9, double hi = 10.0);

/// Smallest n whose best-case r (with p_t = p_t_aggregate(n)) drops below 1.
int threshold_n(double x_tolerance = kMinimizerTolerance);

/// Ancilla photons per two-qubit gate at the threshold (2 * threshold_n()).
inline int threshold_ancillae() { return 2 * threshold_n(); }

enum class ReductionLevel { raw, i, ii, iii };

std::string to_string(ReductionLevel level);
ReductionLevel reduction_level_from_string(std::string_view text);

/// Component counts for one transponder.
struct ResourceCount {
  std::int64_t spg = 0;
  std::int64_t qnd = 0;
  std::int64_t cnot = 0;
  std::int64_t cz = 0;
  std::int64_t one_qubit = 0;
  std::int64_t pd = 0;
  ReductionLevel level = ReductionLevel::raw;

  bool operator==(const ResourceCount&) const = default;
};

/// Counts after successively expanding
///  (i)   each QND device into 2 SPG, 2 CNOT, 2 Hadamards and 2 detectors,
///  (ii)  each CNOT into a CZ between two one-qubit gates,
///  (iii) each CZ into 2n ancilla photons and 2(n+1) detectors.
ResourceCount resources(int n, ReductionLevel level);

/// T_f = 1 / (2 alpha nu): storage time of an unprotected photon pair.
double storage_time(double alpha, double nu);
/// T_f / r.
double improved_storage_time(double alpha, double nu, double r);

}  // namespace lossguard::analytics
