#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "stvanka/mesh.hpp"

namespace stvanka {

/// Quadrature on the unit interval (0,1).
struct QuadRule1D {
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// Tensor-product quadrature on the unit square.
struct QuadRule2D {
  std::vector<Vec2> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// n-point Gauss-Legendre rule on (0,1), exact through degree 2n-1.
QuadRule1D gauss_legendre(int npoints);
/// Tensor product of two n-point rules on (0,1)^2.
QuadRule2D gauss_legendre_2d(int npoints);

/// Legendre polynomial P_n on [-1,1] and its derivative.
void legendre(int n, double x, double &value, double &derivative);

enum class TemporalQuantity { value, derivative, left_limit };

/// Lagrange basis on the right Gauss-Radau points of the reference interval
/// (0,1]. Node k equals 1; the (k+1)-point rule is exact through degree 2k.
class TemporalBasis {
public:
  explicit TemporalBasis(int degree);

  int degree() const { return degree_; }
  int size() const { return degree_ + 1; }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

  double value(int l, double t) const;
  double derivative(int l, double t) const;
  /// Trace at the left end of the interval (the polynomial's value at 0).
  double left_limit(int l) const { return left_limits_.at(check(l)); }
  double eval(int l, double t, TemporalQuantity what) const;

private:
  int check(int l) const;

  int degree_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> denominators_;
  std::vector<double> left_limits_;
};

inline TemporalBasis gauss_radau_right(int k) { return TemporalBasis(k); }

/// Tensor-product Lagrange basis of Q_r on [0,1]^2 with equispaced nodes.
/// Function i = a + (r+1) b interpolates at node (a/r, b/r).
class ScalarBasisQr {
public:
  explicit ScalarBasisQr(int order);

  int order() const { return order_; }
  int size() const { return (order_ + 1) * (order_ + 1); }
  Vec2 node(int i) const;

  double value(int i, Vec2 ref) const;
  Vec2 gradient(int i, Vec2 ref) const;

  /// All values / reference gradients at one point.
  void evaluate(Vec2 ref, std::span<double> values, std::span<Vec2> gradients) const;

  double value_1d(int a, double x) const;
  double derivative_1d(int a, double x) const;

private:
  int check(int i) const;

  int order_;
  std::vector<double> nodes_1d_;
  std::vector<double> denominators_;
};

/// Discontinuous P_{r-1} basis: monomials in element-centered, diameter
/// scaled coordinates ((x - x_K) / h_K)^a ((y - y_K) / h_K)^b, a + b <= r - 1,
/// ordered by total degree then descending a.
class PressureBasisPdisc {
public:
  /// `velocity_order` is r; the polynomial degree is r - 1.
  explicit PressureBasisPdisc(int velocity_order);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(exponents_.size()); }
  std::array<int, 2> exponent(int s) const { return exponents_.at(check(s)); }
  int index_of(int a, int b) const;

  /// Value in scaled local coordinates xbar = (x - x_K) / h_K.
  double value_local(int s, Vec2 xbar) const;
  double value(int s, Vec2 x, Vec2 center, double h) const {
    return value_local(s, (1.0 / h) * (x - center));
  }
  void evaluate_local(Vec2 xbar, std::span<double> values) const;
  double value(int s, Vec2 x, const Mesh &mesh, int element) const {
    return value(s, x, mesh.center(element), mesh.diameter(element));
  }

private:
  int check(int s) const;

  int degree_;
  std::vector<std::array<int, 2>> exponents_;
};

}  // namespace stvanka
