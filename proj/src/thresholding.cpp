#include "vortex/thresholding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vortex/errors.hpp"

namespace vortex {

namespace {

std::size_t bin_index(double x, double lo, double hi, std::size_t n) {
  const double u = (x - lo) / (hi - lo) * static_cast<double>(n);
  if (!(u > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(u), n - 1);
}

}  // namespace

Histogram Histogram::build(std::span<const double> values, double lo, double hi, std::size_t n_bins) {
  if (n_bins == 0) throw ValidationError("histogram needs at least one bin");
  if (!(hi > lo)) throw DegenerateRangeError("histogram range is empty");
  Histogram h;
  h.edges.resize(n_bins + 1);
  for (std::size_t b = 0; b < n_bins; ++b)
    h.edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(n_bins);
  h.edges[n_bins] = hi;
  h.counts.assign(n_bins, 0);
  for (double x : values) {
    if (x < lo || x > hi) continue;
    ++h.counts[bin_index(x, lo, hi, n_bins)];
    ++h.total;
  }
  return h;
}

double Histogram::percent(std::size_t b) const noexcept {
  if (total == 0) return 0.0;
  return 100.0 * static_cast<double>(counts[b]) / static_cast<double>(total);
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::LastBinSmall: return "last-bin-small";
    case StopReason::LastBinsClose: return "last-bins-close";
    case StopReason::LastBinUnchanged: return "last-bin-unchanged";
    case StopReason::IterationCap: return "iteration-cap";
  }
  return "unknown";
}

RefineResult refine_histogram(std::span<const double> lambda2, const RefineParams& params) {
  if (params.n_bins < 2) throw ValidationError("refine_histogram needs n_bins >= 2");
  std::vector<double> negative;
  for (double x : lambda2)
    if (x < 0.0) negative.push_back(x);
  if (negative.empty()) throw NoVorticalValuesError("no vertex with lambda2 < 0");

  {
    std::vector<double> distinct = negative;
    std::sort(distinct.begin(), distinct.end());
    const auto n_distinct = static_cast<std::size_t>(std::unique(distinct.begin(), distinct.end()) - distinct.begin());
    if (n_distinct < params.n_bins) {
      std::ostringstream os;
      os << "only " << n_distinct << " distinct negative lambda2 values for " << params.n_bins << " bins";
      throw DegenerateRangeError(os.str());
    }
  }

  const auto [min_it, max_it] = std::minmax_element(negative.begin(), negative.end());
  Histogram current = Histogram::build(negative, *min_it, *max_it, params.n_bins);

  RefineResult result;
  for (std::size_t it = 1;; ++it) {
    const double lo = current.edges.front();
    const double hi = current.edges.back();
    const double cutoff = params.cutoff_frac * static_cast<double>(current.total);

    double new_lo = std::numeric_limits<double>::infinity();
    double new_hi = -std::numeric_limits<double>::infinity();
    for (double x : negative) {
      if (x < lo || x > hi) continue;
      const std::size_t b = bin_index(x, lo, hi, current.bins());
      if (static_cast<double>(current.counts[b]) < cutoff) continue;
      new_lo = std::min(new_lo, x);
      new_hi = std::max(new_hi, x);
    }
    if (!(new_hi > new_lo)) throw DegenerateRangeError("histogram refinement collapsed to a single value");

    Histogram next = Histogram::build(negative, new_lo, new_hi, params.n_bins);
    const std::size_t last = next.bins() - 1;
    const double last_pct = next.percent(last);
    const double second_pct = next.percent(last - 1);

    result.iterations = it;
    bool stop = true;
    if (last_pct < 100.0 * params.last_bin_frac) {
      result.reason = StopReason::LastBinSmall;
    } else if (std::abs(last_pct - second_pct) < params.diff_pct) {
      result.reason = StopReason::LastBinsClose;
    } else if (next.counts[last] == current.counts[current.bins() - 1]) {
      result.reason = StopReason::LastBinUnchanged;
    } else if (it >= params.max_iterations) {
      result.reason = StopReason::IterationCap;
    } else {
      stop = false;
    }
    current = std::move(next);
    if (stop) break;
  }

  const std::size_t pick = std::min(params.pick_bin, current.bins() - 1);
  result.lambda2_init = current.edges[pick];
  result.final_histogram = std::move(current);
  return result;
}

std::vector<std::size_t> fibonacci_series(std::size_t limit) {
  std::vector<std::size_t> out{0};
  std::size_t a = 1;
  std::size_t b = 2;
  while (a <= limit) {
    if (out.back() != a) out.push_back(a);
    const std::size_t next = a + b;
    a = b;
    b = next;
  }
  return out;
}

std::vector<std::size_t> fibonacci_bin_indices(std::size_t n_bins) {
  if (n_bins == 0) return {};
  return fibonacci_series(n_bins - 1);
}

Lambda2Steps expand_histogram(std::span<const double> lambda2, double lambda2_init, const ExpandParams& params) {
  if (params.n0 == 0) throw ValidationError("expand_histogram needs n0 >= 1");
  std::vector<double> below;
  for (double x : lambda2)
    if (x < lambda2_init && x < 0.0) below.push_back(x);
  if (below.empty()) throw EmptyScheduleError("no vertex with lambda2 below the initial threshold");
  const double lo = *std::min_element(below.begin(), below.end());
  if (!(lambda2_init > lo)) throw EmptyScheduleError("initial threshold does not exceed min(lambda2)");

  std::size_t n = params.n0;
  Histogram h = Histogram::build(below, lo, lambda2_init, n);
  while (h.percent(n - 1) >= 100.0 * params.stop_frac && 2 * n <= params.max_bins) {
    n *= 2;
    h = Histogram::build(below, lo, lambda2_init, n);
  }

  Lambda2Steps steps;
  steps.final_bins = n;
  steps.picked_indices = fibonacci_bin_indices(n);
  steps.values.reserve(steps.picked_indices.size());
  // Sorted-descending bin s is ascending bin n-1-s.
  for (std::size_t s : steps.picked_indices) steps.values.push_back(h.edges[n - 1 - s]);
  return steps;
}

}  // namespace vortex
