#include "qcdj/calculus.hpp"

#include <cmath>

namespace qcdj {

Mat frechet_apply(const HermitianEig& e, const std::function<double(double)>& f,
                  const std::function<double(double)>& fprime, const Mat& m) {
  const int d = m.rows();
  const Mat v = e.vectors;
  Mat w = v.dagger() * m * v;
  double scale = 0.0;
  for (double lam : e.values) scale = std::max(scale, std::abs(lam));
  const double tol = 1e-12 * std::max(scale, 1e-30);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double li = e.values[i], lj = e.values[j];
      const double phi = std::abs(li - lj) > tol ? (f(li) - f(lj)) / (li - lj)
                                                 : fprime(0.5 * (li + lj));
      w(i, j) *= phi;
    }
  return (v * w * v.dagger()).hermitized();
}

Mat unitary_exp_i(const Mat& h) {
  const auto e = hermitian_eig(h);
  const int d = h.rows();
  Mat r(d, d);
  for (int k = 0; k < d; ++k) {
    const cx ph = std::polar(1.0, e.values[k]);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        r(i, j) += e.vectors(i, k) * ph * std::conj(e.vectors(j, k));
  }
  return r;
}

}  // namespace qcdj
