#pragma once

#include <map>
#include <string>

namespace wildwarn {

using LineId = std::string;

inline constexpr int kMonths = 12;
inline constexpr int kHoursPerDay = 24;

/// Spatial and temporal bin widths. Bins are anchored at km 0 and midnight.
struct BinConfig {
  double delta_x = 5.0;  // km
  int delta_t = 1;       // hours; must divide 24

  int hour_bins() const { return kHoursPerDay / delta_t; }

  /// Throws InputError when delta_x <= 0 or delta_t does not divide 24.
  void validate() const;

  bool operator==(const BinConfig&) const = default;
};

/// Index of the half-open bin [i*delta_x, (i+1)*delta_x) that holds `km`.
/// A relative slack of 1e-9 absorbs representation error, so 0.3 with
/// delta_x = 0.1 lands in bin 3.
long x_bin_of(double km, double delta_x);

/// True when `km` is a whole multiple of `delta_x` (same slack as x_bin_of).
bool is_aligned(double km, double delta_x);

/// Maps accident coordinates to bins. Known line ends clamp an accident lying
/// exactly on the final edge into the last bin instead of a bin past the line.
class Binner {
 public:
  Binner() = default;
  explicit Binner(BinConfig bins, std::map<LineId, double> line_ends = {});

  const BinConfig& bins() const noexcept { return bins_; }
  const std::map<LineId, double>& line_ends() const noexcept { return line_ends_; }

  long x_bin(const LineId& line, double km) const;
  int t_bin(int minutes_since_midnight) const { return minutes_since_midnight / 60 / bins_.delta_t; }

 private:
  BinConfig bins_;
  std::map<LineId, double> line_ends_;
};

}  // namespace wildwarn
