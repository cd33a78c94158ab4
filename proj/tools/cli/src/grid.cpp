#include "lossguard_cli/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "lossguard/errors.hpp"

namespace lossguard::cli {

namespace {

void check_range(double lo, double hi, int steps) {
  if (steps < 2) throw DomainError("a grid needs at least 2 steps");
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("a grid needs finite lo < hi");
}

}  // namespace

std::vector<double> linear_steps(double lo, double hi, int steps) {
  check_range(lo, hi, steps);
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (steps - 1);
  out.back() = hi;
  return out;
}

std::vector<double> log_steps(double lo, double hi, int steps) {
  check_range(lo, hi, steps);
  if (!(lo > 0.0)) throw DomainError("a log grid needs lo > 0");
  const double span = std::log(hi / lo);
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(span * i / (steps - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<int> log_integer_steps(int lo, int hi, int steps) {
  if (lo < 1) throw DomainError("an integer log grid needs lo >= 1");
  std::vector<int> out;
  for (double v : log_steps(lo, hi, steps)) out.push_back(static_cast<int>(std::lround(v)));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace lossguard::cli
