#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace elastowave {

/// y = A x. Implementations may keep mutable scratch, so one instance must
/// not be applied from two threads at once.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual int rows() const = 0;
  virtual int cols() const = 0;
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
};

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Compressed sparse rows with columns strictly increasing inside each row.
class CsrMatrix final : public LinearOperator {
 public:
  CsrMatrix() = default;
  CsrMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_ptr_(static_cast<std::size_t>(rows) + 1, 0) {}

  /// Duplicates are summed in input order after a stable sort, so equal
  /// input gives bit-identical matrices.
  static CsrMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);

  int rows() const override { return rows_; }
  int cols() const override { return cols_; }
  void apply(std::span<const double> x, std::span<double> y) const override;

  CsrMatrix transposed() const;
  CsrMatrix scaled(double s) const;
  std::size_t nonzeros() const { return values_.size(); }
  /// Entry (i, j), 0 when not stored.
  double at(int i, int j) const;

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_index() const { return col_; }
  const std::vector<double>& values() const { return values_; }

  /// `row col value` per stored entry.
  void write_triplets(std::ostream& out) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_;
  std::vector<double> values_;
};

/// Builds the explicit matrix of `op` by applying it to unit vectors; entries
/// with |a_ij| <= drop are skipped. Meant for small systems and tests.
CsrMatrix materialize(const LinearOperator& op, double drop = 0.0);

/// y = x^T A x.
double quadratic_form(const LinearOperator& op, std::span<const double> x);

}  // namespace elastowave
