#pragma once

#include "elastowave/types.hpp"

#include <array>
#include <memory>
#include <span>
#include <vector>

namespace elastowave {

/// Gauss-Lobatto-Legendre nodes, weights and nodal differentiation matrix of
/// degree N on [-1, 1]. The nodal basis is the Lagrange basis on the nodes.
struct QuadratureRule1D {
  int degree = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  /// Row-major (N+1)x(N+1); entry (i, j) is the derivative of the j-th
  /// Lagrange polynomial at node i.
  std::vector<double> diff_matrix;

  int size() const { return degree + 1; }
  double diff(int i, int j) const { return diff_matrix[static_cast<std::size_t>(i * size() + j)]; }
};

/// Plain Gauss-Legendre points, used for mortar surfaces and error norms.
struct GaussRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Legendre polynomial P_n(x) and its derivative by the three-term recurrence.
std::pair<double, double> legendre(int n, double x);

QuadratureRule1D gll_rule(int degree);

/// Cached, shared instance; rules are immutable after construction.
std::shared_ptr<const QuadratureRule1D> shared_gll_rule(int degree);

GaussRule1D gauss_legendre_rule(int points);

double lagrange_eval(const QuadratureRule1D& rule, int i, double x);
double lagrange_derivative(const QuadratureRule1D& rule, int i, double x);

/// All N+1 basis values (and derivatives) at x.
void lagrange_all(const QuadratureRule1D& rule, double x, std::span<double> values,
                  std::span<double> derivatives);

struct TensorValue {
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();
};

/// Tensor-product basis function l_i(xi) l_j(eta) l_k(zeta) on the reference
/// hexahedron, with its gradient in reference coordinates.
TensorValue tensor_eval(const QuadratureRule1D& rule, const std::array<int, 3>& index,
                        const Vec3& point);

/// Row-major matrix B(q, j) = l_j(x_q) for arbitrary points x_q.
std::vector<double> interpolation_matrix(const QuadratureRule1D& rule, std::span<const double> points);
/// Row-major matrix D(q, j) = l_j'(x_q).
std::vector<double> derivative_matrix(const QuadratureRule1D& rule, std::span<const double> points);

/// out(c, b, a) = sum_{k,j,i} A2(c,k) A1(b,j) A0(a,i) in(k, j, i), with the
/// fastest index last in memory (a, i). A_d is row-major q_d x p.
/// `scratch` is resized as needed.
void tensor_contract(std::span<const double> a0, std::span<const double> a1, std::span<const double> a2,
                     int p, int q, std::span<const double> in, std::span<double> out,
                     std::vector<double>& scratch);

}  // namespace elastowave
