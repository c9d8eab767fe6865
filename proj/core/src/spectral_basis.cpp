#include "elastowave/spectral_basis.hpp"

#include "elastowave/error.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

namespace elastowave {

std::string_view to_string(DomainKind kind) {
  return kind == DomainKind::Elastic ? "elastic" : "acoustic";
}

std::string_view to_string(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::Dirichlet:
      return "DIR";
    case BoundaryCondition::Neumann:
      return "NEU";
    case BoundaryCondition::Absorbing:
      return "ABS";
  }
  return "?";
}

std::pair<double, double> legendre(int n, double x) {
  if (n == 0) return {1.0, 0.0};
  double p_prev = 1.0;
  double p = x;
  for (int k = 2; k <= n; ++k) {
    const double p_next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
    p_prev = p;
    p = p_next;
  }
  // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1), with the endpoint limit.
  double dp;
  if (std::abs(std::abs(x) - 1.0) < 1e-15) {
    dp = 0.5 * n * (n + 1.0) * (x > 0 ? 1.0 : (n % 2 == 0 ? -1.0 : 1.0));
  } else {
    dp = n * (x * p - p_prev) / (x * x - 1.0);
  }
  return {p, dp};
}

QuadratureRule1D gll_rule(int degree) {
  if (degree < 1) {
    throw InvalidArgument("gll_rule: degree must be >= 1, got " + std::to_string(degree));
  }
  const int n = degree;
  const int np = n + 1;
  QuadratureRule1D rule;
  rule.degree = n;
  rule.nodes.resize(static_cast<std::size_t>(np));
  rule.weights.resize(static_cast<std::size_t>(np));

  // Newton iteration on (1 - x^2) P_N'(x), written through the Legendre
  // recurrence; Chebyshev-Gauss-Lobatto points as the starting guess.
  std::vector<double> p(static_cast<std::size_t>(np + 1));
  for (int i = 0; i < np; ++i) {
    double x = -std::cos(std::numbers::pi * i / n);
    for (int iter = 0; iter < 100; ++iter) {
      p[0] = 1.0;
      p[1] = x;
      for (int k = 2; k <= n; ++k) {
        p[static_cast<std::size_t>(k)] =
            ((2.0 * k - 1.0) * x * p[static_cast<std::size_t>(k - 1)] - (k - 1.0) * p[static_cast<std::size_t>(k - 2)]) / k;
      }
      const double pn = p[static_cast<std::size_t>(n)];
      const double pn1 = p[static_cast<std::size_t>(n - 1)];
      const double dx = (x * pn - pn1) / (np * pn);
      x -= dx;
      if (std::abs(dx) < 1e-14) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = x;
  }
  rule.nodes.front() = -1.0;
  rule.nodes.back() = 1.0;
  for (int i = 0; i < np / 2; ++i) {
    const double half = 0.5 * (rule.nodes[static_cast<std::size_t>(n - i)] - rule.nodes[static_cast<std::size_t>(i)]);
    rule.nodes[static_cast<std::size_t>(i)] = -half;
    rule.nodes[static_cast<std::size_t>(n - i)] = half;
  }
  if (np % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;

  std::vector<double> pn_at(static_cast<std::size_t>(np));
  for (int i = 0; i < np; ++i) {
    const double pn = legendre(n, rule.nodes[static_cast<std::size_t>(i)]).first;
    pn_at[static_cast<std::size_t>(i)] = pn;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / (n * (n + 1.0) * pn * pn);
  }
  for (int i = 0; i < np / 2; ++i) {
    const double w = 0.5 * (rule.weights[static_cast<std::size_t>(i)] + rule.weights[static_cast<std::size_t>(n - i)]);
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - i)] = w;
  }

  rule.diff_matrix.assign(static_cast<std::size_t>(np * np), 0.0);
  for (int i = 0; i < np; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < np; ++j) {
      if (i == j) continue;
      const double d = pn_at[static_cast<std::size_t>(i)] /
                       (pn_at[static_cast<std::size_t>(j)] * (rule.nodes[static_cast<std::size_t>(i)] - rule.nodes[static_cast<std::size_t>(j)]));
      rule.diff_matrix[static_cast<std::size_t>(i * np + j)] = d;
      row_sum += d;
    }
    rule.diff_matrix[static_cast<std::size_t>(i * np + i)] = -row_sum;
  }
  return rule;
}

std::shared_ptr<const QuadratureRule1D> shared_gll_rule(int degree) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const QuadratureRule1D>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[degree];
  if (!slot) slot = std::make_shared<const QuadratureRule1D>(gll_rule(degree));
  return slot;
}

GaussRule1D gauss_legendre_rule(int points) {
  if (points < 1) throw InvalidArgument("gauss_legendre_rule: need at least one point");
  GaussRule1D rule;
  rule.nodes.resize(static_cast<std::size_t>(points));
  rule.weights.resize(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    double x = -std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      auto [p, d] = legendre(points, x);
      dp = d;
      const double dx = p / d;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    dp = legendre(points, x).second;
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  for (int i = 0; i < points / 2; ++i) {
    const auto j = static_cast<std::size_t>(points - 1 - i);
    const auto ii = static_cast<std::size_t>(i);
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[ii]);
    const double w = 0.5 * (rule.weights[j] + rule.weights[ii]);
    rule.nodes[ii] = -x;
    rule.nodes[j] = x;
    rule.weights[ii] = w;
    rule.weights[j] = w;
  }
  if (points % 2 == 1) rule.nodes[static_cast<std::size_t>(points / 2)] = 0.0;
  return rule;
}

namespace {

void check_index(const QuadratureRule1D& rule, int i) {
  if (i < 0 || i > rule.degree) {
    throw InvalidArgument("lagrange basis index " + std::to_string(i) + " out of range for degree " +
                          std::to_string(rule.degree));
  }
}

}  // namespace

double lagrange_eval(const QuadratureRule1D& rule, int i, double x) {
  check_index(rule, i);
  const double xi = rule.nodes[static_cast<std::size_t>(i)];
  double value = 1.0;
  for (int j = 0; j < rule.size(); ++j) {
    if (j == i) continue;
    const double xj = rule.nodes[static_cast<std::size_t>(j)];
    value *= (x - xj) / (xi - xj);
  }
  return value;
}

double lagrange_derivative(const QuadratureRule1D& rule, int i, double x) {
  check_index(rule, i);
  const double xi = rule.nodes[static_cast<std::size_t>(i)];
  double sum = 0.0;
  for (int m = 0; m < rule.size(); ++m) {
    if (m == i) continue;
    double term = 1.0 / (xi - rule.nodes[static_cast<std::size_t>(m)]);
    for (int j = 0; j < rule.size(); ++j) {
      if (j == i || j == m) continue;
      const double xj = rule.nodes[static_cast<std::size_t>(j)];
      term *= (x - xj) / (xi - xj);
    }
    sum += term;
  }
  return sum;
}

void lagrange_all(const QuadratureRule1D& rule, double x, std::span<double> values,
                  std::span<double> derivatives) {
  for (int i = 0; i < rule.size(); ++i) {
    if (!values.empty()) values[static_cast<std::size_t>(i)] = lagrange_eval(rule, i, x);
    if (!derivatives.empty()) derivatives[static_cast<std::size_t>(i)] = lagrange_derivative(rule, i, x);
  }
}

TensorValue tensor_eval(const QuadratureRule1D& rule, const std::array<int, 3>& index, const Vec3& point) {
  for (int d = 0; d < 3; ++d) {
    if (!(point[d] >= -1.0 - 1e-12 && point[d] <= 1.0 + 1e-12)) {
      throw InvalidArgument("tensor_eval: point outside the reference hexahedron");
    }
  }
  std::array<double, 3> l{};
  std::array<double, 3> dl{};
  for (int d = 0; d < 3; ++d) {
    l[static_cast<std::size_t>(d)] = lagrange_eval(rule, index[static_cast<std::size_t>(d)], point[d]);
    dl[static_cast<std::size_t>(d)] = lagrange_derivative(rule, index[static_cast<std::size_t>(d)], point[d]);
  }
  TensorValue out;
  out.value = l[0] * l[1] * l[2];
  out.gradient = Vec3(dl[0] * l[1] * l[2], l[0] * dl[1] * l[2], l[0] * l[1] * dl[2]);
  return out;
}

std::vector<double> interpolation_matrix(const QuadratureRule1D& rule, std::span<const double> points) {
  std::vector<double> b(points.size() * static_cast<std::size_t>(rule.size()));
  for (std::size_t q = 0; q < points.size(); ++q) {
    for (int j = 0; j < rule.size(); ++j) {
      b[q * static_cast<std::size_t>(rule.size()) + static_cast<std::size_t>(j)] = lagrange_eval(rule, j, points[q]);
    }
  }
  return b;
}

std::vector<double> derivative_matrix(const QuadratureRule1D& rule, std::span<const double> points) {
  std::vector<double> d(points.size() * static_cast<std::size_t>(rule.size()));
  for (std::size_t q = 0; q < points.size(); ++q) {
    for (int j = 0; j < rule.size(); ++j) {
      d[q * static_cast<std::size_t>(rule.size()) + static_cast<std::size_t>(j)] = lagrange_derivative(rule, j, points[q]);
    }
  }
  return d;
}

void tensor_contract(std::span<const double> a0, std::span<const double> a1, std::span<const double> a2,
                     int p, int q, std::span<const double> in, std::span<double> out,
                     std::vector<double>& scratch) {
  const auto P = static_cast<std::size_t>(p);
  const auto Q = static_cast<std::size_t>(q);
  scratch.resize(P * P * Q + P * Q * Q);
  double* t1 = scratch.data();          // (k, j, a)
  double* t2 = scratch.data() + P * P * Q;  // (k, b, a)
  for (std::size_t k = 0; k < P; ++k) {
    for (std::size_t j = 0; j < P; ++j) {
      const double* row = in.data() + (k * P + j) * P;
      for (std::size_t a = 0; a < Q; ++a) {
        const double* coef = a0.data() + a * P;
        double s = 0.0;
        for (std::size_t i = 0; i < P; ++i) s += coef[i] * row[i];
        t1[(k * P + j) * Q + a] = s;
      }
    }
  }
  for (std::size_t k = 0; k < P; ++k) {
    for (std::size_t b = 0; b < Q; ++b) {
      const double* coef = a1.data() + b * P;
      for (std::size_t a = 0; a < Q; ++a) {
        double s = 0.0;
        for (std::size_t j = 0; j < P; ++j) s += coef[j] * t1[(k * P + j) * Q + a];
        t2[(k * Q + b) * Q + a] = s;
      }
    }
  }
  for (std::size_t c = 0; c < Q; ++c) {
    const double* coef = a2.data() + c * P;
    for (std::size_t b = 0; b < Q; ++b) {
      for (std::size_t a = 0; a < Q; ++a) {
        double s = 0.0;
        for (std::size_t k = 0; k < P; ++k) s += coef[k] * t2[(k * Q + b) * Q + a];
        out[(c * Q + b) * Q + a] = s;
      }
    }
  }
}

}  // namespace elastowave
