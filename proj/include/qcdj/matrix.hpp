#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qcdj {

using cx = std::complex<double>;

/// Dense complex matrix, row-major storage.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols)
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

  static Mat identity(int n);
  static Mat zeros(int rows, int cols);
  static Mat diag(const std::vector<double>& d);
  /// Column vector from entries.
  static Mat column(const std::vector<cx>& v);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  std::size_t size() const { return a_.size(); }

  cx& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const cx& operator()(int i, int j) const {
    return a_[static_cast<std::size_t>(i) * cols_ + j];
  }

  std::vector<cx>& data() { return a_; }
  const std::vector<cx>& data() const { return a_; }

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat& operator*=(cx s);

  Mat dagger() const;
  Mat transposed() const;
  Mat conjugated() const;
  /// (A + A†)/2.
  Mat hermitized() const;

  cx trace() const;
  double norm_fro() const;
  double max_abs() const;
  bool finite() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<cx> a_;
};

Mat operator+(Mat x, const Mat& y);
Mat operator-(Mat x, const Mat& y);
Mat operator*(const Mat& x, const Mat& y);
Mat operator*(cx s, Mat x);
Mat operator*(Mat x, cx s);
Mat operator*(double s, Mat x);
Mat operator*(Mat x, double s);

/// Kronecker product, first factor most significant.
Mat kron(const Mat& x, const Mat& y);

/// n-fold Kronecker power; n = 0 gives the 1x1 identity.
Mat kron_power(const Mat& x, int n);

/// u v† for column vectors.
Mat outer(const Mat& u, const Mat& v);

/// tr(X† Y).
cx hs_inner(const Mat& x, const Mat& y);

/// Re tr(X Y) without forming the product.
double real_trace_prod(const Mat& x, const Mat& y);

}  // namespace qcdj
