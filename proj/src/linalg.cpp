#include "vortex/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vortex::linalg {

namespace {

constexpr double kDiscriminantFloor = 1e-30;
constexpr double kCloseRoots = 1e-3;

void jacobi_rotate(Mat3& a, Mat3& v, int p, int q) {
  if (a[p][q] == 0.0) return;
  const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  for (int k = 0; k < 3; ++k) {
    const double akp = a[k][p];
    const double akq = a[k][q];
    a[k][p] = c * akp - s * akq;
    a[k][q] = s * akp + c * akq;
  }
  for (int k = 0; k < 3; ++k) {
    const double apk = a[p][k];
    const double aqk = a[q][k];
    a[p][k] = c * apk - s * aqk;
    a[q][k] = s * apk + c * aqk;
  }
  for (int k = 0; k < 3; ++k) {
    const double vkp = v[k][p];
    const double vkq = v[k][q];
    v[k][p] = c * vkp - s * vkq;
    v[k][q] = s * vkp + c * vkq;
  }
}

}  // namespace

SymmetricEigen symmetric_eigen(const Mat3& input) {
  Mat3 a = input;
  Mat3 v{};
  for (int i = 0; i < 3; ++i) v[i][i] = 1.0;

  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    const double diag = a[0][0] * a[0][0] + a[1][1] * a[1][1] + a[2][2] * a[2][2];
    if (off <= 1e-32 * diag || off == 0.0) break;
    jacobi_rotate(a, v, 0, 1);
    jacobi_rotate(a, v, 0, 2);
    jacobi_rotate(a, v, 1, 2);
  }

  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int x, int y) { return a[x][x] > a[y][y]; });
  SymmetricEigen out;
  for (int c = 0; c < 3; ++c) {
    out.values[c] = a[order[c]][order[c]];
    for (int r = 0; r < 3; ++r) out.vectors[r][c] = v[r][order[c]];
  }
  return out;
}

std::array<double, 3> symmetric_eigenvalues(const Mat3& a) {
  const double p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
  const double q = trace(a) / 3.0;
  const double d0 = a[0][0] - q;
  const double d1 = a[1][1] - q;
  const double d2 = a[2][2] - q;
  const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
  if (std::abs(p2) < kDiscriminantFloor) {
    return symmetric_eigen(a).values;
  }
  const double p = std::sqrt(p2 / 6.0);
  Mat3 b = a;
  for (int i = 0; i < 3; ++i) b[i][i] -= q;
  for (auto& row : b)
    for (double& x : row) x /= p;
  const double r = std::clamp(determinant(b) / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  std::array<double, 3> e{e1, e2, e3};
  std::sort(e.begin(), e.end(), std::greater<>());
  // Near a repeated root acos loses half the digits.
  if (std::min(e[0] - e[1], e[1] - e[2]) < kCloseRoots * p) return symmetric_eigen(a).values;
  return e;
}

double swirling_strength(const Mat3& j) {
  // Characteristic polynomial x^3 + a x^2 + b x + c, depressed to t^3 + p t + q.
  const double a = -trace(j);
  const double b = j[0][0] * j[1][1] - j[0][1] * j[1][0] + j[0][0] * j[2][2] - j[0][2] * j[2][0] +
                   j[1][1] * j[2][2] - j[1][2] * j[2][1];
  const double c = -determinant(j);
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double disc = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);
  if (disc <= 0.0) return 0.0;
  const double sq = std::sqrt(disc);
  const double u = std::cbrt(-q / 2.0 + sq);
  const double v = std::cbrt(-q / 2.0 - sq);
  return std::sqrt(3.0) / 2.0 * std::abs(u - v);
}

}  // namespace vortex::linalg
