#include "qcdj/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace qcdj {

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::zeros(int rows, int cols) { return Mat(rows, cols); }

Mat Mat::diag(const std::vector<double>& d) {
  Mat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
  return m;
}

Mat Mat::column(const std::vector<cx>& v) {
  Mat m(static_cast<int>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<int>(i), 0) = v[i];
  return m;
}

Mat& Mat::operator+=(const Mat& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Mat: shape mismatch in +=");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

Mat& Mat::operator-=(const Mat& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Mat: shape mismatch in -=");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
  return *this;
}

Mat& Mat::operator*=(cx s) {
  for (auto& z : a_) z *= s;
  return *this;
}

Mat Mat::dagger() const {
  Mat m(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

Mat Mat::transposed() const {
  Mat m(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
  return m;
}

Mat Mat::conjugated() const {
  Mat m(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = std::conj(a_[i]);
  return m;
}

Mat Mat::hermitized() const {
  if (!square()) throw std::invalid_argument("Mat: hermitized needs a square matrix");
  Mat m(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      m(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
  return m;
}

cx Mat::trace() const {
  if (!square()) throw std::invalid_argument("Mat: trace needs a square matrix");
  cx t = 0.0;
  for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double Mat::norm_fro() const {
  double s = 0.0;
  for (const auto& z : a_) s += std::norm(z);
  return std::sqrt(s);
}

double Mat::max_abs() const {
  double m = 0.0;
  for (const auto& z : a_) m = std::max(m, std::abs(z));
  return m;
}

bool Mat::finite() const {
  for (const auto& z : a_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

Mat operator+(Mat x, const Mat& y) { return x += y; }
Mat operator-(Mat x, const Mat& y) { return x -= y; }

Mat operator*(const Mat& x, const Mat& y) {
  if (x.cols() != y.rows()) throw std::invalid_argument("Mat: shape mismatch in *");
  Mat r(x.rows(), y.cols());
  for (int i = 0; i < x.rows(); ++i) {
    for (int k = 0; k < x.cols(); ++k) {
      const cx xik = x(i, k);
      if (xik == cx(0.0)) continue;
      for (int j = 0; j < y.cols(); ++j) r(i, j) += xik * y(k, j);
    }
  }
  return r;
}

Mat operator*(cx s, Mat x) { return x *= s; }
Mat operator*(Mat x, cx s) { return x *= s; }
Mat operator*(double s, Mat x) { return x *= cx(s); }
Mat operator*(Mat x, double s) { return x *= cx(s); }

Mat kron(const Mat& x, const Mat& y) {
  Mat r(x.rows() * y.rows(), x.cols() * y.cols());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) {
      const cx xij = x(i, j);
      if (xij == cx(0.0)) continue;
      for (int k = 0; k < y.rows(); ++k)
        for (int l = 0; l < y.cols(); ++l)
          r(i * y.rows() + k, j * y.cols() + l) = xij * y(k, l);
    }
  return r;
}

Mat kron_power(const Mat& x, int n) {
  if (n < 0) throw std::invalid_argument("kron_power: negative power");
  Mat r = Mat::identity(1);
  for (int i = 0; i < n; ++i) r = kron(r, x);
  return r;
}

Mat outer(const Mat& u, const Mat& v) {
  if (u.cols() != 1 || v.cols() != 1) throw std::invalid_argument("outer: expects column vectors");
  Mat r(u.rows(), v.rows());
  for (int i = 0; i < u.rows(); ++i)
    for (int j = 0; j < v.rows(); ++j) r(i, j) = u(i, 0) * std::conj(v(j, 0));
  return r;
}

cx hs_inner(const Mat& x, const Mat& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw std::invalid_argument("hs_inner: shape mismatch");
  cx s = 0.0;
  for (std::size_t i = 0; i < x.data().size(); ++i) s += std::conj(x.data()[i]) * y.data()[i];
  return s;
}

double real_trace_prod(const Mat& x, const Mat& y) {
  if (x.cols() != y.rows() || x.rows() != y.cols())
    throw std::invalid_argument("real_trace_prod: shape mismatch");
  double s = 0.0;
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) s += (x(i, j) * y(j, i)).real();
  return s;
}

}  // namespace qcdj
