#include "qcdj/states.hpp"

#include <cmath>
#include <stdexcept>

namespace qcdj {

namespace {

void check_hermitian(const Mat& m, const char* who) {
  if (!m.square()) throw std::invalid_argument(std::string(who) + ": matrix must be square");
  if (!m.finite()) throw std::invalid_argument(std::string(who) + ": non-finite entries");
  Mat d = m - m.dagger();
  if (d.max_abs() > 1e-10)
    throw std::invalid_argument(std::string(who) + ": matrix is not Hermitian within 1e-10");
}

}  // namespace

DensityMatrix::DensityMatrix(Mat m, bool validate) : m_(std::move(m)) {
  if (!validate) return;
  check_hermitian(m_, "DensityMatrix");
  if (std::abs(m_.trace() - cx(1.0)) > 1e-10)
    throw std::invalid_argument("DensityMatrix: trace differs from one by more than 1e-10");
  const auto e = hermitian_eig(m_);
  if (e.values.back() < -1e-10)
    throw std::invalid_argument("DensityMatrix: negative eigenvalue below -1e-10");
}

Effect::Effect(Mat m, bool validate) : m_(std::move(m)) {
  if (!validate) return;
  check_hermitian(m_, "Effect");
  const auto e = hermitian_eig(m_);
  if (e.values.back() < -1e-10 || e.values.front() > 1.0 + 1e-10)
    throw std::invalid_argument("Effect: spectrum outside [0, 1] by more than 1e-10");
}

Mat project_to_density(const Mat& m) {
  const auto e = hermitian_eig(m);
  const int n = m.rows();
  double tr = 0.0;
  std::vector<double> v(e.values);
  for (auto& x : v) {
    x = std::max(x, 0.0);
    tr += x;
  }
  if (tr <= 0.0) return Mat::identity(n) * (1.0 / n);
  Mat r(n, n);
  for (int k = 0; k < n; ++k) {
    const double w = v[k] / tr;
    if (w == 0.0) continue;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        r(i, j) += e.vectors(i, k) * w * std::conj(e.vectors(j, k));
  }
  return r;
}

Mat canonical_purification(const Mat& rho) {
  check_hermitian(rho, "canonical_purification");
  const int d = rho.rows();
  const auto e = hermitian_eig(rho);
  Mat psi(d * d, 1);
  for (int k = 0; k < d; ++k) {
    const double lam = std::max(e.values[k], 0.0);
    if (lam == 0.0) continue;
    // Phase convention: first component of magnitude above 1e-10 made real
    // positive, so equal input matrices purify to identical vectors.
    cx phase = 1.0;
    for (int i = 0; i < d; ++i) {
      const cx vi = e.vectors(i, k);
      if (std::abs(vi) > 1e-10) {
        phase = std::conj(vi) / std::abs(vi);
        break;
      }
    }
    const double s = std::sqrt(lam);
    for (int i = 0; i < d; ++i) psi(i * d + k, 0) = s * phase * e.vectors(i, k);
  }
  return psi;
}

Mat random_density(int dim, Rng& rng) {
  Mat g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.cgauss();
  Mat r = g * g.dagger();
  r *= cx(1.0 / r.trace().real());
  return r.hermitized();
}

Mat random_pure(int dim, Rng& rng) {
  Mat v(dim, 1);
  double n2 = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v(i, 0) = rng.cgauss();
    n2 = v.norm_fro();
  } while (n2 < 1e-6);
  v *= cx(1.0 / n2);
  return v;
}

}  // namespace qcdj
