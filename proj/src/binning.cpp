#include "wildwarn/binning.hpp"

#include <cmath>

#include "wildwarn/errors.hpp"

namespace wildwarn {

namespace {
constexpr double kSlack = 1e-9;
}

void BinConfig::validate() const {
  if (!(delta_x > 0.0) || !std::isfinite(delta_x))
    throw InputError("delta_x must be a positive number of km");
  if (delta_t <= 0 || kHoursPerDay % delta_t != 0)
    throw InputError("delta_t must be a whole number of hours dividing 24, got " +
                     std::to_string(delta_t));
}

long x_bin_of(double km, double delta_x) {
  return static_cast<long>(std::floor(km / delta_x + kSlack));
}

bool is_aligned(double km, double delta_x) {
  const double q = km / delta_x;
  return std::fabs(q - std::round(q)) <= kSlack * std::max(1.0, std::fabs(q));
}

Binner::Binner(BinConfig bins, std::map<LineId, double> line_ends)
    : bins_(bins), line_ends_(std::move(line_ends)) {
  bins_.validate();
}

long Binner::x_bin(const LineId& line, double km) const {
  const long bin = x_bin_of(km, bins_.delta_x);
  if (auto it = line_ends_.find(line); it != line_ends_.end()) {
    const double end = it->second;
    if (bin > 0 && is_aligned(end, bins_.delta_x) && bin == x_bin_of(end, bins_.delta_x) &&
        std::fabs(km - end) <= kSlack * std::max(1.0, end))
      return bin - 1;
  }
  return bin;
}

}  // namespace wildwarn
