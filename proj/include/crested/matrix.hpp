#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace crested {

using Vec = std::vector<double>;

// Dense row-major matrix. Everything in this library operates at desk scale
// (state spaces up to a few thousand), so no sparsity or blocking.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t m);
  // J_m: every entry 1/m.
  static Matrix uniform(std::size_t m);
  static Matrix diagonal(const Vec& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }
  double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }

  Matrix transposed() const;
  Matrix& operator+=(const Matrix& other);
  Matrix& operator*=(double s);

  Vec col(std::size_t j) const;
  void set_col(std::size_t j, const Vec& v);

  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator+(Matrix a, const Matrix& b);

Matrix kron(const Matrix& a, const Matrix& b);
Matrix kron(std::span<const Matrix> factors);

// y = A x  and  y = x^T A.
Vec matvec(const Matrix& a, const Vec& x);
Vec vecmat(const Vec& x, const Matrix& a);

Matrix matrix_power(const Matrix& a, unsigned k);

double max_abs(const Vec& v);
double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(const Vec& a, const Vec& b);
double dot(const Vec& a, const Vec& b);

// Half the L1 distance between two distributions.
double total_variation(const Vec& a, const Vec& b);

// Unique stationary distribution of an irreducible stochastic matrix, via
// Gaussian elimination on (P^T - I) with the normalization sum(pi) = 1.
Vec stationary_distribution(const Matrix& p);

}  // namespace crested
