#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace vortex {

// Equal-width histogram. Bins are half-open [lo, hi) except the last, which is
// closed. Samples outside [edges.front(), edges.back()] are not counted.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::int64_t> counts;
  std::int64_t total = 0;

  static Histogram build(std::span<const double> values, double lo, double hi, std::size_t n_bins);

  [[nodiscard]] std::size_t bins() const noexcept { return counts.size(); }
  [[nodiscard]] double width() const noexcept { return (edges.back() - edges.front()) / static_cast<double>(bins()); }
  // Share of `total` in bin b, in percent.
  [[nodiscard]] double percent(std::size_t b) const noexcept;
};

struct RefineParams {
  std::size_t n_bins = 100;
  double cutoff_frac = 0.001;   // bins below this share of samples are dropped
  double last_bin_frac = 0.30;  // stop (a)
  double diff_pct = 20.0;       // stop (b), percentage points
  std::size_t max_iterations = 100;
  std::size_t pick_bin = 89;    // threshold = lower edge of this bin (the 90th)
};

enum class StopReason { LastBinSmall, LastBinsClose, LastBinUnchanged, IterationCap };

const char* to_string(StopReason r);

struct RefineResult {
  double lambda2_init = 0.0;
  Histogram final_histogram;
  std::size_t iterations = 0;
  StopReason reason = StopReason::IterationCap;
};

// Dataset-adaptive initial threshold from the negative part of `lambda2`.
// Throws NoVorticalValuesError when nothing is negative and
// DegenerateRangeError when fewer than n_bins distinct negative values exist.
RefineResult refine_histogram(std::span<const double> lambda2, const RefineParams& params = {});

struct ExpandParams {
  std::size_t n0 = 100;
  double stop_frac = 0.10;
  std::size_t max_bins = std::size_t{1} << 22;
};

// Strictly decreasing isovalue schedule, every value below lambda2_init.
struct Lambda2Steps {
  std::vector<double> values;
  std::size_t final_bins = 0;
  std::vector<std::size_t> picked_indices;  // into the descending-sorted bins
};

// Fibonacci numbers {0, 1, 2, 3, 5, 8, ...} that are <= limit, deduplicated.
std::vector<std::size_t> fibonacci_series(std::size_t limit);

// Fibonacci indices that address one of `n_bins` bins (i.e. < n_bins).
std::vector<std::size_t> fibonacci_bin_indices(std::size_t n_bins);

// Histogram expansion over [min(lambda2), lambda2_init] followed by Fibonacci
// selection of bin lower edges. Throws EmptyScheduleError when no sample lies
// below lambda2_init.
Lambda2Steps expand_histogram(std::span<const double> lambda2, double lambda2_init, const ExpandParams& params = {});

}  // namespace vortex
