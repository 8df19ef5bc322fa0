#include "vortex/clustering.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <spdlog/spdlog.h>

#include "vortex/errors.hpp"

namespace vortex {

StandardizedMatrix standardize(std::span<const VortexProfile> profiles, std::span<const std::string> attributes) {
  if (profiles.size() < 2) throw ValidationError("standardize needs at least 2 profiles");
  std::vector<std::size_t> cols;
  for (const auto& name : attributes) {
    const auto idx = feature_index(name);
    if (!idx) throw ValidationError("unknown attribute '" + name + "'");
    cols.push_back(*idx);
  }
  StandardizedMatrix out;
  out.matrix = Matrix(profiles.size(), cols.size());
  const auto n = static_cast<double>(profiles.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    double mean = 0.0;
    for (const auto& p : profiles) mean += p.values[cols[c]];
    mean /= n;
    double var = 0.0;
    for (const auto& p : profiles) var += (p.values[cols[c]] - mean) * (p.values[cols[c]] - mean);
    const double sd = std::sqrt(var / n);
    if (!(sd > 0.0)) {
      spdlog::warn("attribute '{}' has zero variance; mapped to zeros", attributes[c]);
      out.zero_variance.push_back(attributes[c]);
      continue;
    }
    for (std::size_t r = 0; r < profiles.size(); ++r) out.matrix(r, c) = (profiles[r].values[cols[c]] - mean) / sd;
  }
  return out;
}

namespace {

std::uint64_t row_hash(std::uint64_t seed, std::span<const double> row) {
  std::uint64_t h = 14695981039346656037ULL ^ seed;
  for (double v : row) {
    const auto bits = std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xFFU;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

// Box-Muller on mt19937_64 so draws are identical across standard libraries.
std::array<double, 2> gaussian_pair(std::uint64_t key) {
  std::mt19937_64 rng(key);
  const double u1 = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  return {r * std::cos(2.0 * std::numbers::pi * u2), r * std::sin(2.0 * std::numbers::pi * u2)};
}

// Row-conditional affinities with entropy log(perplexity), by bisection on
// the Gaussian precision.
std::vector<double> conditional_affinities(const std::vector<double>& d2, std::size_t n, double perplexity) {
  std::vector<double> p(n * n, 0.0);
  const double target = std::log(perplexity);
  for (std::size_t i = 0; i < n; ++i) {
    double beta = 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) dmin = std::min(dmin, d2[i * n + j]);
    for (int it = 0; it < 200; ++it) {
      double sum = 0.0;
      double weighted = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double e = std::exp(-beta * (d2[i * n + j] - dmin));
        p[i * n + j] = e;
        sum += e;
        weighted += e * (d2[i * n + j] - dmin);
      }
      const double entropy = std::log(sum) + beta * weighted / sum;
      for (std::size_t j = 0; j < n; ++j) p[i * n + j] /= sum;
      const double diff = entropy - target;
      if (std::abs(diff) < 1e-5) break;
      if (diff > 0.0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
  }
  return p;
}

Matrix embed_rows(const Matrix& x, const TsneParams& params, std::vector<double>* kl_trace) {
  const std::size_t n = x.rows;

  std::vector<double> d2(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < x.cols; ++c) {
        const double d = x(i, c) - x(j, c);
        s += d * d;
      }
      d2[i * n + j] = d2[j * n + i] = s;
    }

  const std::vector<double> cond = conditional_affinities(d2, n, params.perplexity);
  std::vector<double> p(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) p[i * n + j] = std::max((cond[i * n + j] + cond[j * n + i]) / (2.0 * static_cast<double>(n)), 1e-12);

  Matrix y(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const auto g = gaussian_pair(row_hash(params.seed, x.row(i)));
    y(i, 0) = 1e-4 * g[0];
    y(i, 1) = 1e-4 * g[1];
  }

  const double eta = params.learning_rate > 0.0
                         ? params.learning_rate
                         : std::max(static_cast<double>(n) / params.early_exaggeration / 4.0, 50.0);
  std::vector<double> update(n * 2, 0.0);
  std::vector<double> gains(n * 2, 1.0);
  std::vector<double> grad(n * 2, 0.0);

  auto kl_of = [&](const Matrix& pts) {
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = pts(i, 0) - pts(j, 0);
        const double dy = pts(i, 1) - pts(j, 1);
        z += 2.0 / (1.0 + dx * dx + dy * dy);
      }
    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double dx = pts(i, 0) - pts(j, 0);
        const double dy = pts(i, 1) - pts(j, 1);
        const double q = std::max(1.0 / (1.0 + dx * dx + dy * dy) / z, 1e-300);
        kl += p[i * n + j] * std::log(p[i * n + j] / q);
      }
    return kl;
  };

  // After exaggeration a step that raises KL is undone and retried from rest
  // with half the step, so the objective never goes up.
  double kl_prev = std::numeric_limits<double>::infinity();
  double step_scale = 1.0;
  Matrix y_prev;
  for (int it = 0; it < params.iterations; ++it) {
    const bool exaggerate = it < params.exaggeration_iterations;
    const double exag = exaggerate ? params.early_exaggeration : 1.0;
    const double momentum = exaggerate ? 0.5 : 0.8;
    if (!exaggerate) y_prev = y;

    std::vector<double> num(n * n, 0.0);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = y(i, 0) - y(j, 0);
        const double dy = y(i, 1) - y(j, 1);
        const double q = 1.0 / (1.0 + dx * dx + dy * dy);
        num[i * n + j] = num[j * n + i] = q;
        z += 2.0 * q;
      }
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double q = num[i * n + j];
        const double mult = (exag * p[i * n + j] - q / z) * q;
        grad[2 * i] += 4.0 * mult * (y(i, 0) - y(j, 0));
        grad[2 * i + 1] += 4.0 * mult * (y(i, 1) - y(j, 1));
      }
    for (std::size_t k = 0; k < 2 * n; ++k) {
      const bool same_sign = (grad[k] > 0.0) == (update[k] > 0.0);
      gains[k] = same_sign ? std::max(gains[k] * 0.8, 0.01) : gains[k] + 0.2;
      update[k] = momentum * update[k] - step_scale * eta * gains[k] * grad[k];
      y.data[k] += update[k];
    }
    for (int c = 0; c < 2; ++c) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += y(i, c);
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) y(i, c) -= mean;
    }

    if (exaggerate) {
      if (kl_trace) kl_trace->push_back(kl_of(y));
      continue;
    }
    const double kl = kl_of(y);
    if (kl > kl_prev) {
      y = y_prev;
      std::fill(update.begin(), update.end(), 0.0);
      std::fill(gains.begin(), gains.end(), 1.0);
      step_scale *= 0.5;
    } else {
      kl_prev = kl;
      step_scale = 1.0;
    }
    if (kl_trace) kl_trace->push_back(kl_prev);
  }
  return y;
}

}  // namespace

Matrix embed_2d(const Matrix& x, const TsneParams& params, std::vector<double>* kl_trace) {
  const std::size_t n = x.rows;
  if (n < 5) throw ValidationError("t-SNE needs at least 5 points");
  if (!(params.perplexity > 0.0) || !(params.perplexity < (static_cast<double>(n) - 1.0) / 3.0)) {
    std::ostringstream os;
    os << "perplexity must be in (0, (N-1)/3) = (0, " << (static_cast<double>(n) - 1.0) / 3.0 << ")";
    throw ValidationError(os.str());
  }
  // Optimise in row-content order so every floating-point sum sees the same
  // sequence whatever order the caller used.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = x.row(a), rb = x.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  Matrix sorted(n, x.cols);
  for (std::size_t r = 0; r < n; ++r) std::copy_n(x.row(order[r]).begin(), x.cols, &sorted(r, 0));
  const Matrix ys = embed_rows(sorted, params, kl_trace);
  Matrix y(n, 2);
  for (std::size_t r = 0; r < n; ++r) {
    y(order[r], 0) = ys(r, 0);
    y(order[r], 1) = ys(r, 1);
  }
  return y;
}

std::vector<int> dbscan(const Matrix& points, double eps, std::size_t min_pts) {
  if (!(eps > 0.0)) throw ValidationError("dbscan eps must be > 0");
  const std::size_t n = points.rows;
  const double eps2 = eps * eps;
  auto neighbours = [&](std::size_t i) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < points.cols; ++c) {
        const double d = points(i, c) - points(j, c);
        s += d * d;
      }
      if (s <= eps2) out.push_back(j);
    }
    return out;
  };

  constexpr int kUnvisited = -2;
  std::vector<int> labels(n, kUnvisited);
  int cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != kUnvisited) continue;
    auto seeds = neighbours(i);
    if (seeds.size() < min_pts) {
      labels[i] = kNoise;
      continue;
    }
    labels[i] = cluster;
    std::deque<std::size_t> queue(seeds.begin(), seeds.end());
    while (!queue.empty()) {
      const std::size_t q = queue.front();
      queue.pop_front();
      if (labels[q] == kNoise) labels[q] = cluster;
      if (labels[q] != kUnvisited) continue;
      labels[q] = cluster;
      auto more = neighbours(q);
      if (more.size() >= min_pts) queue.insert(queue.end(), more.begin(), more.end());
    }
    ++cluster;
  }
  return labels;
}

double k_distance_eps(const Matrix& points, std::size_t k) {
  const std::size_t n = points.rows;
  if (n < 2) throw ValidationError("k-distance needs at least 2 points");
  k = std::clamp<std::size_t>(k, 1, n - 1);
  std::vector<double> kd(n);
  std::vector<double> dists;
  for (std::size_t i = 0; i < n; ++i) {
    dists.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double s = 0.0;
      for (std::size_t c = 0; c < points.cols; ++c) {
        const double d = points(i, c) - points(j, c);
        s += d * d;
      }
      dists.push_back(std::sqrt(s));
    }
    std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(k - 1), dists.end());
    kd[i] = dists[k - 1];
  }
  std::sort(kd.begin(), kd.end());
  // Elbow: point farthest from the chord joining the first and last values.
  const double x0 = 0.0;
  const double y0 = kd.front();
  const double x1 = static_cast<double>(n - 1);
  const double y1 = kd.back();
  const double len = std::hypot(x1 - x0, y1 - y0);
  std::size_t best = n - 1;
  double best_d = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs((y1 - y0) * static_cast<double>(i) - (x1 - x0) * (kd[i] - y0)) / len;
    if (d > best_d) {
      best_d = d;
      best = i;
    }
  }
  const double eps = kd[best];
  if (eps > 0.0) return eps;
  return kd.back() > 0.0 ? kd.back() : 1.0;
}

void ClusterRequest::validate(std::size_t n_points) const {
  if (attributes.size() < 2) throw ValidationError("at least 2 attributes required");
  for (const auto& a : attributes)
    if (!feature_index(a)) throw ValidationError("unknown attribute '" + a + "'");
  if (n_points < 5) throw ValidationError("at least 5 vortices in scope required");
  if (!(perplexity > 0.0) || !(perplexity < (static_cast<double>(n_points) - 1.0) / 3.0)) {
    std::ostringstream os;
    os << "perplexity must be < (N-1)/3 = " << (static_cast<double>(n_points) - 1.0) / 3.0;
    throw ValidationError(os.str());
  }
  if (eps && !(*eps > 0.0)) throw ValidationError("eps must be > 0");
  if (min_pts < 1) throw ValidationError("min_pts must be >= 1");
  if (iterations < 1) throw ValidationError("iterations must be >= 1");
}

ClusterResult run_cluster_request(std::span<const VortexProfile> profiles, const ClusterRequest& request,
                                  std::span<const std::int64_t> candidate_ids) {
  std::vector<VortexProfile> scoped;
  for (const auto& p : profiles) {
    if (request.scope == ClusterScope::HairpinCandidates &&
        std::find(candidate_ids.begin(), candidate_ids.end(), p.id) == candidate_ids.end())
      continue;
    scoped.push_back(p);
  }
  request.validate(scoped.size());

  ClusterResult result;
  for (const auto& p : scoped) result.ids.push_back(p.id);
  const auto standardized = standardize(scoped, request.attributes);
  TsneParams tp;
  tp.perplexity = request.perplexity;
  tp.seed = request.seed;
  tp.iterations = request.iterations;
  result.coords = embed_2d(standardized.matrix, tp);
  result.eps = request.eps ? *request.eps : k_distance_eps(result.coords, request.min_pts);
  result.labels = dbscan(result.coords, result.eps, request.min_pts);
  result.cluster_count = 0;
  for (int l : result.labels) result.cluster_count = std::max(result.cluster_count, l + 1);
  return result;
}

std::vector<std::string> preset_attributes(std::string_view name) {
  if (name == "couette") return {"lambda2", "Oyf", "C_h_tilde", "S_t", "S_p", "S_v", "L"};
  if (name == "benard") return {"lambda2", "Size", "S_t", "S_v"};
  throw ValidationError("unknown preset '" + std::string(name) + "' (expected couette or benard)");
}

}  // namespace vortex
