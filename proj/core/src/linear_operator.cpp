#include "elastowave/linear_operator.hpp"

#include "elastowave/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace elastowave {

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw InvalidArgument("triplet outside the matrix bounds");
    }
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m(rows, cols);
  m.col_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::size_t i = 0;
  for (int r = 0; r < rows; ++r) {
    while (i < triplets.size() && triplets[i].row == r) {
      const int c = triplets[i].col;
      double v = 0.0;
      while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c) v += triplets[i++].value;
      m.col_.push_back(c);
      m.values_.push_back(v);
    }
    m.row_ptr_[static_cast<std::size_t>(r) + 1] = static_cast<int>(m.col_.size());
  }
  return m;
}

void CsrMatrix::apply(std::span<const double> x, std::span<double> y) const {
  for (int r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (int k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
      s += values_[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(col_[static_cast<std::size_t>(k)])];
    }
    y[static_cast<std::size_t>(r)] = s;
  }
}

CsrMatrix CsrMatrix::transposed() const {
  CsrMatrix t(cols_, rows_);
  for (int c : col_) ++t.row_ptr_[static_cast<std::size_t>(c) + 1];
  for (int r = 0; r < cols_; ++r) t.row_ptr_[static_cast<std::size_t>(r) + 1] += t.row_ptr_[static_cast<std::size_t>(r)];
  t.col_.resize(col_.size());
  t.values_.resize(values_.size());
  std::vector<int> fill(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
      const int c = col_[static_cast<std::size_t>(k)];
      const auto pos = static_cast<std::size_t>(fill[static_cast<std::size_t>(c)]++);
      t.col_[pos] = r;
      t.values_[pos] = values_[static_cast<std::size_t>(k)];
    }
  }
  return t;
}

CsrMatrix CsrMatrix::scaled(double s) const {
  CsrMatrix m = *this;
  for (auto& v : m.values_) v *= s;
  return m;
}

double CsrMatrix::at(int i, int j) const {
  const auto b = col_.begin() + row_ptr_[static_cast<std::size_t>(i)];
  const auto e = col_.begin() + row_ptr_[static_cast<std::size_t>(i) + 1];
  auto it = std::lower_bound(b, e, j);
  return it != e && *it == j ? values_[static_cast<std::size_t>(it - col_.begin())] : 0.0;
}

void CsrMatrix::write_triplets(std::ostream& out) const {
  out << std::setprecision(17);
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
      out << r << ' ' << col_[static_cast<std::size_t>(k)] << ' ' << values_[static_cast<std::size_t>(k)] << '\n';
    }
  }
}

CsrMatrix materialize(const LinearOperator& op, double drop) {
  std::vector<double> x(static_cast<std::size_t>(op.cols()), 0.0);
  std::vector<double> y(static_cast<std::size_t>(op.rows()), 0.0);
  std::vector<Triplet> triplets;
  for (int j = 0; j < op.cols(); ++j) {
    x[static_cast<std::size_t>(j)] = 1.0;
    op.apply(x, y);
    x[static_cast<std::size_t>(j)] = 0.0;
    for (int i = 0; i < op.rows(); ++i) {
      const double v = y[static_cast<std::size_t>(i)];
      if (v != 0.0 && std::abs(v) > drop) triplets.push_back({i, j, v});
    }
  }
  return CsrMatrix::from_triplets(op.rows(), op.cols(), std::move(triplets));
}

double quadratic_form(const LinearOperator& op, std::span<const double> x) {
  std::vector<double> y(static_cast<std::size_t>(op.rows()));
  op.apply(x, y);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += x[i] * y[i];
  return s;
}

}  // namespace elastowave
