#pragma once

#include "qcdj/linalg.hpp"
#include "qcdj/matrix.hpp"
#include "qcdj/rng.hpp"

namespace qcdj {

/// Validated density operator. Hermiticity, positivity and unit trace are
/// enforced at construction within 1e-10.
class DensityMatrix {
 public:
  explicit DensityMatrix(Mat m, bool validate = true);

  const Mat& mat() const { return m_; }
  int dim() const { return m_.rows(); }

 private:
  Mat m_;
};

/// Validated measurement effect: Hermitian with spectrum in [0, 1] up to 1e-10.
class Effect {
 public:
  explicit Effect(Mat m, bool validate = true);

  const Mat& mat() const { return m_; }
  int dim() const { return m_.rows(); }

 private:
  Mat m_;
};

/// Clamp a nearly-PSD Hermitian matrix onto the density manifold: negative
/// eigenvalues to zero, then renormalize the trace.
Mat project_to_density(const Mat& m);

/// Pure state psi on A x R with dim R = dim A and tr_R |psi><psi| = rho.
/// Construction uses the eigenbasis of rho, eigenvalues descending, each
/// eigenvector's phase fixed so its first nonzero component is real positive,
/// paired with computational basis vectors on R.
Mat canonical_purification(const Mat& rho);

Mat random_density(int dim, Rng& rng);
Mat random_pure(int dim, Rng& rng);  // column vector

}  // namespace qcdj
