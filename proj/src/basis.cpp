#include "stvanka/basis.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace stvanka {

void legendre(int n, double x, double &value, double &derivative) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) {
    value = 1.0;
    derivative = 0.0;
    return;
  }
  double dp0 = 0.0;
  double dp1 = 1.0;
  for (int j = 2; j <= n; ++j) {
    const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
    const double dp2 = dp0 + (2 * j - 1) * p1;
    p0 = p1;
    p1 = p2;
    dp0 = dp1;
    dp1 = dp2;
  }
  value = p1;
  derivative = dp1;
}

QuadRule1D gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre rule needs at least one point");
  QuadRule1D rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(n, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1,1] -> [0,1]; x > 0 here, so fill from both ends.
    rule.points[i] = 0.5 * (1.0 - x);
    rule.points[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.5;
  return rule;
}

QuadRule2D gauss_legendre_2d(int n) {
  const QuadRule1D r = gauss_legendre(n);
  QuadRule2D rule;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      rule.points.push_back({r.points[i], r.points[j]});
      rule.weights.push_back(r.weights[i] * r.weights[j]);
    }
  return rule;
}

namespace {

// Interior right-Radau points on [-1,1]: zeros of the Jacobi polynomial
// P_k^{(1,0)}, computed as eigenvalues of its Jacobi matrix.
std::vector<double> jacobi_10_zeros(int k) {
  if (k == 0) return {};
  const double alpha = 1.0, beta = 0.0;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
  for (int n = 0; n < k; ++n) {
    const double s = 2.0 * n + alpha + beta;
    T(n, n) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    if (n + 1 < k) {
      const double m = n + 1;
      const double sm = 2.0 * m + alpha + beta;
      const double b = std::sqrt(4.0 * m * (m + alpha) * (m + beta) * (m + alpha + beta) /
                                 (sm * sm * (sm + 1.0) * (sm - 1.0)));
      T(n, n + 1) = b;
      T(n + 1, n) = b;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
  std::vector<double> z(es.eigenvalues().data(), es.eigenvalues().data() + k);
  // Polish as roots of P_{k+1} - P_k, which vanishes at x = 1 and at the
  // interior Radau points.
  for (double &x : z) {
    for (int it = 0; it < 50; ++it) {
      double pk, dpk, pk1, dpk1;
      legendre(k, x, pk, dpk);
      legendre(k + 1, x, pk1, dpk1);
      const double dx = (pk1 - pk) / (dpk1 - dpk);
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
  }
  std::sort(z.begin(), z.end());
  return z;
}

}  // namespace

TemporalBasis::TemporalBasis(int degree) : degree_(degree) {
  if (degree < 0) throw std::invalid_argument("temporal degree must be non-negative");
  for (double x : jacobi_10_zeros(degree)) nodes_.push_back(0.5 * (1.0 + x));
  nodes_.push_back(1.0);

  denominators_.resize(nodes_.size());
  for (std::size_t l = 0; l < nodes_.size(); ++l) {
    double d = 1.0;
    for (std::size_t m = 0; m < nodes_.size(); ++m)
      if (m != l) d *= nodes_[l] - nodes_[m];
    denominators_[l] = d;
  }

  const QuadRule1D gl = gauss_legendre(degree + 1);
  weights_.assign(nodes_.size(), 0.0);
  for (int l = 0; l <= degree; ++l)
    for (std::size_t q = 0; q < gl.size(); ++q) weights_[l] += gl.weights[q] * value(l, gl.points[q]);

  for (int l = 0; l <= degree; ++l) left_limits_.push_back(value(l, 0.0));

  // Self-check: exactness through degree 2k.
  for (int j = 0; j <= 2 * degree; ++j) {
    double s = 0.0;
    for (int l = 0; l <= degree; ++l) s += weights_[l] * std::pow(nodes_[l], j);
    if (std::abs(s - 1.0 / (j + 1)) > 1e-12)
      throw std::logic_error("Gauss-Radau rule of degree " + std::to_string(degree) +
                             " failed its exactness check");
  }
}

int TemporalBasis::check(int l) const {
  if (l < 0 || l > degree_)
    throw std::out_of_range("temporal basis index " + std::to_string(l) + " out of range");
  return l;
}

double TemporalBasis::value(int l, double t) const {
  check(l);
  double v = 1.0;
  for (int m = 0; m <= degree_; ++m)
    if (m != l) v *= t - nodes_[m];
  return v / denominators_[l];
}

double TemporalBasis::derivative(int l, double t) const {
  check(l);
  double sum = 0.0;
  for (int j = 0; j <= degree_; ++j) {
    if (j == l) continue;
    double prod = 1.0;
    for (int m = 0; m <= degree_; ++m)
      if (m != l && m != j) prod *= t - nodes_[m];
    sum += prod;
  }
  return sum / denominators_[l];
}

double TemporalBasis::eval(int l, double t, TemporalQuantity what) const {
  switch (what) {
  case TemporalQuantity::value: return value(l, t);
  case TemporalQuantity::derivative: return derivative(l, t);
  case TemporalQuantity::left_limit: return left_limit(l);
  }
  return 0.0;
}

ScalarBasisQr::ScalarBasisQr(int order) : order_(order) {
  if (order < 1) throw std::invalid_argument("Q_r needs r >= 1");
  for (int a = 0; a <= order; ++a) nodes_1d_.push_back(static_cast<double>(a) / order);
  for (int a = 0; a <= order; ++a) {
    double d = 1.0;
    for (int m = 0; m <= order; ++m)
      if (m != a) d *= nodes_1d_[a] - nodes_1d_[m];
    denominators_.push_back(d);
  }
}

int ScalarBasisQr::check(int i) const {
  if (i < 0 || i >= size())
    throw std::out_of_range("Q_r basis index " + std::to_string(i) + " out of range");
  return i;
}

Vec2 ScalarBasisQr::node(int i) const {
  check(i);
  return {nodes_1d_[i % (order_ + 1)], nodes_1d_[i / (order_ + 1)]};
}

double ScalarBasisQr::value_1d(int a, double x) const {
  double v = 1.0;
  for (int m = 0; m <= order_; ++m)
    if (m != a) v *= x - nodes_1d_[m];
  return v / denominators_[a];
}

double ScalarBasisQr::derivative_1d(int a, double x) const {
  double sum = 0.0;
  for (int j = 0; j <= order_; ++j) {
    if (j == a) continue;
    double prod = 1.0;
    for (int m = 0; m <= order_; ++m)
      if (m != a && m != j) prod *= x - nodes_1d_[m];
    sum += prod;
  }
  return sum / denominators_[a];
}

double ScalarBasisQr::value(int i, Vec2 ref) const {
  check(i);
  const int a = i % (order_ + 1);
  const int b = i / (order_ + 1);
  return value_1d(a, ref.x) * value_1d(b, ref.y);
}

Vec2 ScalarBasisQr::gradient(int i, Vec2 ref) const {
  check(i);
  const int a = i % (order_ + 1);
  const int b = i / (order_ + 1);
  return {derivative_1d(a, ref.x) * value_1d(b, ref.y), value_1d(a, ref.x) * derivative_1d(b, ref.y)};
}

void ScalarBasisQr::evaluate(Vec2 ref, std::span<double> values, std::span<Vec2> gradients) const {
  const int n = order_ + 1;
  double vx[8], vy[8], dx[8], dy[8];
  for (int a = 0; a < n; ++a) {
    vx[a] = value_1d(a, ref.x);
    vy[a] = value_1d(a, ref.y);
    dx[a] = derivative_1d(a, ref.x);
    dy[a] = derivative_1d(a, ref.y);
  }
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) {
      const int i = a + n * b;
      if (!values.empty()) values[i] = vx[a] * vy[b];
      if (!gradients.empty()) gradients[i] = {dx[a] * vy[b], vx[a] * dy[b]};
    }
}

PressureBasisPdisc::PressureBasisPdisc(int velocity_order) : degree_(velocity_order - 1) {
  if (velocity_order < 1) throw std::invalid_argument("pressure basis needs r >= 1");
  for (int d = 0; d <= degree_; ++d)
    for (int a = d; a >= 0; --a) exponents_.push_back({a, d - a});
}

int PressureBasisPdisc::check(int s) const {
  if (s < 0 || s >= size())
    throw std::out_of_range("pressure basis index " + std::to_string(s) + " out of range");
  return s;
}

int PressureBasisPdisc::index_of(int a, int b) const {
  for (int s = 0; s < size(); ++s)
    if (exponents_[s][0] == a && exponents_[s][1] == b) return s;
  throw std::out_of_range("monomial not in the pressure space");
}

double PressureBasisPdisc::value_local(int s, Vec2 xbar) const {
  const auto [a, b] = exponents_.at(check(s));
  double v = 1.0;
  for (int i = 0; i < a; ++i) v *= xbar.x;
  for (int i = 0; i < b; ++i) v *= xbar.y;
  return v;
}

void PressureBasisPdisc::evaluate_local(Vec2 xbar, std::span<double> values) const {
  for (int s = 0; s < size(); ++s) values[s] = value_local(s, xbar);
}

}  // namespace stvanka
