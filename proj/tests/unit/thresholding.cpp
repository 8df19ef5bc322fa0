#include <doctest.h>

#include <random>

#include "vortex/errors.hpp"
#include "vortex/thresholding.hpp"

using namespace vortex;

namespace {

// n evenly spread values in [lo, hi).
std::vector<double> spread(double lo, double hi, std::size_t n) {
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(n));
  return v;
}

}  // namespace

TEST_CASE("histogram bins are half-open except the last") {
  const std::vector<double> v{0.0, 0.5, 1.0, 1.0, 2.0, -1.0, 3.0};
  const Histogram h = Histogram::build(v, 0.0, 2.0, 2);
  CHECK(h.counts == std::vector<std::int64_t>{2, 3});
  CHECK(h.total == 5);
  CHECK(h.edges.front() == 0.0);
  CHECK(h.edges.back() == 2.0);
  CHECK(h.percent(1) == doctest::Approx(60.0));
}

TEST_CASE("uniform negative samples stop on (a) with the 90th bin edge") {
  std::vector<double> v;
  for (int i = 0; i < 100000; ++i) v.push_back(-1.0 + i / 100000.0);
  const RefineResult r = refine_histogram(v);
  CHECK(r.reason == StopReason::LastBinSmall);
  CHECK(r.iterations == 1);
  CHECK(r.lambda2_init == doctest::Approx(-0.11).epsilon(1e-3));
  // one bin below -0.10
  CHECK(std::abs(r.lambda2_init + 0.1) <= r.final_histogram.width() * 1.001);
}

TEST_CASE("each stop condition can be hit on its own") {
  SUBCASE("(b) last two bins close") {
    // 70% of mass in the top two bins, split 36/34: (a) fails, (b) holds.
    std::vector<double> v = spread(-1.0, -0.02, 3000);
    const auto a = spread(-0.02, -0.01, 3600);
    const auto b = spread(-0.01, 0.0, 3400);
    v.insert(v.end(), a.begin(), a.end());
    v.insert(v.end(), b.begin(), b.end());
    const RefineResult r = refine_histogram(v);
    CHECK(r.reason == StopReason::LastBinsClose);
    CHECK(r.iterations == 1);
  }
  SUBCASE("(c) last bin unchanged") {
    // 60% in the last bin, 5% in the second last; nothing to cut, so the
    // re-histogram keeps the same last-bin count.
    std::vector<double> v = spread(-1.0, -0.02, 3500);
    const auto a = spread(-0.02, -0.01, 500);
    const auto b = spread(-0.01, 0.0, 6000);
    v.insert(v.end(), a.begin(), a.end());
    v.insert(v.end(), b.begin(), b.end());
    const RefineResult r = refine_histogram(v);
    CHECK(r.reason == StopReason::LastBinUnchanged);
  }
  SUBCASE("iteration cap") {
    RefineParams p;
    p.max_iterations = 1;
    std::vector<double> v = spread(-1.0, -0.02, 2000);
    // The cut drops sparse bins and moves the range, so (c) cannot hold in
    // the first iteration.
    v.push_back(-5.0);
    const auto b = spread(-0.01, 0.0, 6000);
    v.insert(v.end(), b.begin(), b.end());
    const RefineResult r = refine_histogram(v, p);
    CHECK(r.reason == StopReason::IterationCap);
    CHECK(r.iterations == 1);
  }
}

TEST_CASE("refinement errors") {
  CHECK_THROWS_AS(refine_histogram(std::vector<double>{0.0, 1.0, 2.0}), NoVorticalValuesError);
  CHECK_THROWS_AS(refine_histogram(std::vector<double>(500, -1.0)), DegenerateRangeError);
}

TEST_CASE("refinement terminates within the cap on fuzz inputs") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v;
    std::exponential_distribution<double> ex(0.5 + t % 7);
    std::normal_distribution<double> g(-1.0, 0.3);
    for (int i = 0; i < 5000; ++i) v.push_back(t % 2 ? -ex(rng) : g(rng));
    const RefineResult r = refine_histogram(v);
    CHECK(r.iterations <= 100);
    CHECK(r.lambda2_init < 0.0);
  }
}

TEST_CASE("fibonacci index sets") {
  CHECK(fibonacci_bin_indices(13) == std::vector<std::size_t>{0, 1, 2, 3, 5, 8});
  CHECK(fibonacci_bin_indices(100) == std::vector<std::size_t>{0, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89});
  CHECK(fibonacci_bin_indices(200) == std::vector<std::size_t>{0, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144});
  CHECK(fibonacci_series(13) == std::vector<std::size_t>{0, 1, 2, 3, 5, 8, 13});
}

TEST_CASE("expansion schedule is strictly decreasing below the threshold") {
  std::mt19937_64 rng(4);
  std::exponential_distribution<double> ex(3.0);
  std::vector<double> v;
  for (int i = 0; i < 20000; ++i) v.push_back(-ex(rng));
  const RefineResult r = refine_histogram(v);
  const Lambda2Steps s = expand_histogram(v, r.lambda2_init);
  REQUIRE(!s.values.empty());
  CHECK(s.values.front() < r.lambda2_init);
  for (std::size_t i = 1; i < s.values.size(); ++i) CHECK(s.values[i] < s.values[i - 1]);
  // Denser near lambda2_init for a decaying distribution.
  for (std::size_t i = 2; i < s.values.size(); ++i)
    CHECK(s.values[i - 1] - s.values[i] >= s.values[i - 2] - s.values[i - 1] - 1e-12);
  CHECK(s.picked_indices == fibonacci_bin_indices(s.final_bins));
}

TEST_CASE("expansion doubles the bins while the top bin is heavy") {
  // 95% of the mass in the top percent of the range.
  std::vector<double> v = spread(-1.0, -0.01, 500);
  const auto top = spread(-0.01, 0.0, 9500);
  v.insert(v.end(), top.begin(), top.end());
  const Lambda2Steps s = expand_histogram(v, 0.0);
  CHECK(s.final_bins >= 200);
  ExpandParams p;
  p.n0 = 13;
  const Lambda2Steps small = expand_histogram(spread(-1, 0, 1300), 0.0, p);
  CHECK(small.final_bins == 13);
  CHECK(small.values.size() == 6);
  CHECK(small.values[0] == doctest::Approx(-1.0 / 13.0).epsilon(1e-3));
}

TEST_CASE("expansion errors and determinism") {
  CHECK_THROWS_AS(expand_histogram(std::vector<double>{-0.1, 0.2}, -0.5), EmptyScheduleError);
  std::vector<double> v = spread(-2.0, 0.0, 4000);
  const auto a = expand_histogram(v, -0.3);
  const auto b = expand_histogram(v, -0.3);
  CHECK(a.values == b.values);
}
