#pragma once

#include <functional>

#include "qcdj/linalg.hpp"
#include "qcdj/matrix.hpp"

namespace qcdj {

/// Frechet derivative of a matrix function at a Hermitian point, applied to
/// a Hermitian direction: with A = V diag(lam) V† given by `e`, returns
/// V [phi .* (V† m V)] V† where phi_ij is the divided difference of f and
/// collapses to f' on near-degenerate pairs. For Hermitian m this equals the
/// adjoint map, so it doubles as the gradient pullback of X -> tr[f(X) m].
Mat frechet_apply(const HermitianEig& e, const std::function<double(double)>& f,
                  const std::function<double(double)>& fprime, const Mat& m);

/// exp(i H) for Hermitian H.
Mat unitary_exp_i(const Mat& h);

}  // namespace qcdj
