#pragma once

// Sweep grids and number formatting shared by the sweep commands.

#include <string>
#include <vector>

namespace lossguard::cli {

/// `steps` evenly spaced points from lo to hi inclusive.
std::vector<double> linear_steps(double lo, double hi, int steps);
/// `steps` points from lo to hi inclusive, evenly spaced in log(x).
std::vector<double> log_steps(double lo, double hi, int steps);
/// Log-spaced points rounded to integers, duplicates removed.
std::vector<int> log_integer_steps(int lo, int hi, int steps);

/// 17 significant digits, '.' decimal point, no locale.
std::string format_number(double value);

}  // namespace lossguard::cli
