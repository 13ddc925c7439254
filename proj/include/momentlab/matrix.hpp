#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "momentlab/errors.hpp"

namespace momentlab {

using Complex = std::complex<double>;

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

/// Conjugate that keeps real scalars real.
inline double cj(double x) { return x; }
inline Complex cj(const Complex& z) { return std::conj(z); }

inline double abs2(double x) { return x * x; }
inline double abs2(const Complex& z) { return std::norm(z); }

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Dense row-major matrix over double or complex<double>.
template <typename T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill)
  {
    if (!momentlab::is_finite(fill)) throw NonFiniteEntry("matrix entry is NaN or Inf");
  }

  /// Takes ownership of row-major data; rejects NaN/Inf entries.
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data))
  {
    if (data_.size() != rows_ * cols_) {
      throw ShapeError("data length " + std::to_string(data_.size()) + " does not match " +
                       std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    for (const auto& v : data_) {
      if (!momentlab::is_finite(v)) throw NonFiniteEntry("matrix entry is NaN or Inf");
    }
  }

  Matrix(std::initializer_list<std::initializer_list<T>> rows)
  {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw ShapeError("ragged initializer list");
      data_.insert(data_.end(), r.begin(), r.end());
    }
    for (const auto& v : data_) {
      if (!momentlab::is_finite(v)) throw NonFiniteEntry("matrix entry is NaN or Inf");
    }
  }

  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

  static Matrix identity(std::size_t n)
  {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  static Matrix diagonal(std::span<const T> d)
  {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static Matrix diagonal(std::initializer_list<T> d)
  {
    return diagonal(std::span<const T>(d.begin(), d.size()));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool is_square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  std::vector<T> col(std::size_t j) const
  {
    std::vector<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  void set_col(std::size_t j, std::span<const T> c)
  {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
  }

  std::vector<T> diag() const
  {
    std::vector<T> d(std::min(rows_, cols_));
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (*this)(i, i);
    return d;
  }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const
  {
    Matrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

  void set_block(std::size_t r0, std::size_t c0, const Matrix& b)
  {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }

  Matrix adjoint() const
  {
    Matrix a(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) a(j, i) = cj((*this)(i, j));
    return a;
  }

  Matrix transpose() const
  {
    Matrix a(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) a(j, i) = (*this)(i, j);
    return a;
  }

  Matrix conjugate() const
  {
    Matrix a(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) a.data_[k] = cj(data_[k]);
    return a;
  }

  Matrix& operator+=(const Matrix& o)
  {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }

  Matrix& operator-=(const Matrix& o)
  {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }

  Matrix& operator*=(T s)
  {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, T s) { return a *= s; }
  friend Matrix operator*(T s, Matrix a) { return a *= s; }
  friend Matrix operator-(Matrix a) { return a *= T{-1}; }

  friend Matrix operator*(const Matrix& a, const Matrix& b)
  {
    if (a.cols_ != b.rows_) {
      throw ShapeError("cannot multiply " + a.shape_string() + " by " + b.shape_string());
    }
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T aik = a(i, k);
        if (aik == T{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend std::vector<T> operator*(const Matrix& a, std::span<const T> x)
  {
    if (a.cols_ != x.size()) throw ShapeError("matrix-vector size mismatch");
    std::vector<T> y(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) y[i] += a(i, j) * x[j];
    return y;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) = default;

  std::string shape_string() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

 private:
  void require_same_shape(const Matrix& o) const
  {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw ShapeError("shape mismatch " + shape_string() + " vs " + o.shape_string());
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using CMatrix = Matrix<Complex>;
using RMatrix = Matrix<double>;

template <typename T>
double frobenius_norm(const Matrix<T>& a)
{
  double s = 0.0;
  for (const auto& v : a.data()) s += abs2(v);
  return std::sqrt(s);
}

/// max(1, ‖A‖_F): the scale used for all relative tolerances.
template <typename T>
double tolerance_scale(const Matrix<T>& a)
{
  return std::max(1.0, frobenius_norm(a));
}

template <typename T>
T trace(const Matrix<T>& a)
{
  T t{};
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
  return t;
}

template <typename T>
bool all_finite(const Matrix<T>& a)
{
  return std::all_of(a.data().begin(), a.data().end(), [](const T& v) { return is_finite(v); });
}

template <typename T>
double vector_norm(std::span<const T> v)
{
  double s = 0.0;
  for (const auto& x : v) s += abs2(x);
  return std::sqrt(s);
}

template <typename T>
T inner_product(std::span<const T> x, std::span<const T> y)
{
  T s{};
  for (std::size_t i = 0; i < x.size(); ++i) s += cj(x[i]) * y[i];
  return s;
}

/// Frobenius norm of A - A^*.
double hermitian_defect(const CMatrix& a);
/// Frobenius norm of A + A^*.
double skew_hermitian_defect(const CMatrix& a);
/// Frobenius norm of U^*U - I.
double unitarity_defect(const CMatrix& u);

/// Structural predicates against η_struct = 1e-12 · max(1, ‖A‖_F).
bool is_hermitian(const CMatrix& a, double eta = 1e-12);
bool is_skew_hermitian(const CMatrix& a, double eta = 1e-12);
bool is_unitary(const CMatrix& u, double eta = 1e-12);

CMatrix to_complex(const RMatrix& a);
CMatrix commutator(const CMatrix& a, const CMatrix& b);

}  // namespace momentlab
