#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "qcdj/linalg.hpp"
#include "qcdj/matrix.hpp"
#include "qcdj/rng.hpp"

using namespace qcdj;

namespace {

Mat random_hermitian(int n, Rng& rng) {
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.cgauss();
  return g.hermitized();
}

Mat random_psd(int n, Rng& rng) {
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.cgauss();
  return g * g.dagger();
}

double reconstruction_error(const Mat& h, const HermitianEig& e) {
  const int n = h.rows();
  Mat r = h.hermitized();
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        r(i, j) -= e.vectors(i, k) * e.values[k] * std::conj(e.vectors(j, k));
  return op_norm(r);
}

}  // namespace

TEST_CASE("pauli x eigendecomposition matches the closed form") {
  Mat x(2, 2);
  x(0, 1) = 1.0;
  x(1, 0) = 1.0;
  const auto e = hermitian_eig(x);
  CHECK(e.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.values[1] == doctest::Approx(-1.0).epsilon(1e-14));
  // Eigenvectors up to phase: |<v|(1,±1)/sqrt2>| = 1.
  const double s = 1.0 / std::sqrt(2.0);
  const cx p0 = std::conj(e.vectors(0, 0)) * s + std::conj(e.vectors(1, 0)) * s;
  const cx p1 = std::conj(e.vectors(0, 1)) * s - std::conj(e.vectors(1, 1)) * s;
  CHECK(std::abs(p0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(p1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random hermitian eigendecompositions reconstruct and are orthonormal") {
  Rng rng(7);
  for (int dim : {2, 3, 5, 8, 16, 40}) {
    Mat h = random_hermitian(dim, rng);
    const auto e = hermitian_eig(h);
    CHECK(reconstruction_error(h, e) <= 1e-10 * dim * std::max(1.0, h.max_abs()));
    Mat vv = e.vectors.dagger() * e.vectors;
    vv -= Mat::identity(dim);
    CHECK(vv.max_abs() <= 1e-12 * dim);
    for (int k = 0; k + 1 < dim; ++k) CHECK(e.values[k] >= e.values[k + 1]);
  }
}

TEST_CASE("eigendecomposition handles degenerate and diagonal input") {
  Rng rng(11);
  Mat h = Mat::diag({2.0, 2.0, 2.0, -1.0});
  const auto e = hermitian_eig(h);
  CHECK(reconstruction_error(h, e) <= 1e-12);
  CHECK(e.values[0] == doctest::Approx(2.0));
  CHECK(e.values[3] == doctest::Approx(-1.0));

  // Degenerate spectrum with rotated blocks still reconstructs.
  Mat u = hermitian_eig(random_hermitian(4, rng)).vectors;
  Mat rotated = u * h * u.dagger();
  const auto e2 = hermitian_eig(rotated);
  CHECK(reconstruction_error(rotated, e2) <= 1e-11);
}

TEST_CASE("hermitian_eig rejects bad input") {
  CHECK_THROWS_AS(hermitian_eig(Mat(2, 3)), std::invalid_argument);
  Mat bad(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(hermitian_eig(bad), std::invalid_argument);
}

TEST_CASE("matrix_fn on support zeroes small eigenvalues and flags domain errors") {
  Mat rho = Mat::diag({0.9, 0.1, 0.0});
  Mat lg = matrix_log_support(rho);
  CHECK(lg(0, 0).real() == doctest::Approx(std::log(0.9)).epsilon(1e-13));
  CHECK(lg(1, 1).real() == doctest::Approx(std::log(0.1)).epsilon(1e-13));
  CHECK(std::abs(lg(2, 2)) <= 1e-14);

  // A negative eigenvalue sits below the support threshold, so the support
  // variant zeroes it; without the filter the undefined log must throw.
  Mat neg = Mat::diag({1.0, -0.5});
  Mat lneg = matrix_log_support(neg);
  CHECK(std::abs(lneg(1, 1)) <= 1e-14);
  CHECK_THROWS_AS(matrix_fn(neg, [](double x) { return std::log(x); }, false), std::domain_error);

  // Square then square root on the support is the identity there.
  Rng rng(3);
  Mat p = random_psd(4, rng);
  Mat back = matrix_pow_support(matrix_pow_support(p, 0.5), 2.0);
  back -= p;
  CHECK(back.max_abs() <= 1e-10 * std::max(1.0, p.max_abs()));
}

TEST_CASE("matrix_exp matches the scalar exponential on commuting input") {
  Mat h = Mat::diag({0.3, -1.2});
  Mat e = matrix_exp(h);
  CHECK(e(0, 0).real() == doctest::Approx(std::exp(0.3)).epsilon(1e-14));
  CHECK(e(1, 1).real() == doctest::Approx(std::exp(-1.2)).epsilon(1e-14));
}

TEST_CASE("partial trace agrees with the direct-summation reference") {
  Rng rng(19);
  const std::vector<int> dims = {2, 3, 2};
  const int total = 12;
  Mat x(total, total);
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j) x(i, j) = rng.cgauss();

  for (const auto& keep : std::vector<std::vector<int>>{{0}, {1}, {2}, {0, 1}, {1, 2}, {0, 2}, {0, 1, 2}}) {
    Mat got = partial_trace(x, dims, keep);
    Mat want = oracle::partial_trace_direct(x, dims, keep);
    got -= want;
    CHECK(got.max_abs() <= 1e-12);
  }
}

TEST_CASE("partial trace of a product state splits into factors") {
  Rng rng(23);
  Mat a = random_psd(2, rng);
  a *= cx(1.0 / a.trace().real());
  Mat b = random_psd(3, rng);
  b *= cx(1.0 / b.trace().real());
  Mat ab = kron(a, b);
  Mat ta = partial_trace(ab, {2, 3}, {0});
  ta -= a;
  CHECK(ta.max_abs() <= 1e-12);
  Mat tb = partial_trace(ab, {2, 3}, {1});
  tb -= b;
  CHECK(tb.max_abs() <= 1e-12);
  CHECK(std::abs(partial_trace(ab, {2, 3}, {}).operator()(0, 0) - cx(1.0)) <= 1e-12);
}

TEST_CASE("permute_systems relabels kron factors") {
  Rng rng(29);
  Mat a = random_hermitian(2, rng);
  Mat b = random_hermitian(3, rng);
  Mat c = random_hermitian(2, rng);
  Mat abc = kron(kron(a, b), c);
  // Output order (c, a, b): output factor 0 is input factor 2, etc.
  Mat got = permute_systems(abc, {2, 3, 2}, {2, 0, 1});
  Mat want = kron(kron(c, a), b);
  got -= want;
  CHECK(got.max_abs() <= 1e-12);
}

TEST_CASE("permutation unitary acts on product basis states") {
  // Swap on two qubits: |01> -> |10>.
  Mat u = permutation_unitary(2, 2, {1, 0});
  CHECK(u(2, 1).real() == doctest::Approx(1.0));
  CHECK(u(1, 2).real() == doctest::Approx(1.0));
  CHECK(u(0, 0).real() == doctest::Approx(1.0));
  CHECK(u(3, 3).real() == doctest::Approx(1.0));

  // Product-vector action: factor j of the input lands in slot perm[j].
  Rng rng(31);
  std::vector<Mat> f;
  for (int k = 0; k < 3; ++k) {
    Mat v(3, 1);
    for (int i = 0; i < 3; ++i) v(i, 0) = rng.cgauss();
    f.push_back(v);
  }
  const std::vector<int> perm = {2, 0, 1};
  Mat in = kron(kron(f[0], f[1]), f[2]);
  // Slot s receives the factor j with perm[j] = s.
  Mat want = kron(kron(f[1], f[2]), f[0]);
  Mat got = permutation_unitary(3, 3, perm) * in;
  got -= want;
  CHECK(got.max_abs() <= 1e-12);
}

TEST_CASE("permutation unitaries form a homomorphism") {
  const int n = 3, d = 2;
  const std::vector<int> pi = {1, 2, 0};
  const std::vector<int> tau = {0, 2, 1};
  std::vector<int> comp(n);  // pi after tau
  for (int j = 0; j < n; ++j) comp[j] = pi[tau[j]];
  Mat lhs = permutation_unitary(n, d, pi) * permutation_unitary(n, d, tau);
  Mat rhs = permutation_unitary(n, d, comp);
  lhs -= rhs;
  CHECK(lhs.max_abs() <= 1e-12);

  // Three-cycle cubed is the identity.
  Mat c = permutation_unitary(3, 2, {1, 2, 0});
  Mat c3 = c * c * c;
  c3 -= Mat::identity(8);
  CHECK(c3.max_abs() <= 1e-12);
}

TEST_CASE("distinct eigenvalue clustering counts gaps above tolerance") {
  Mat h = Mat::diag({1.0, 1.0 + 1e-9, 0.5, 0.5 + 5e-7, 0.0});
  CHECK(distinct_eigenvalue_count(h, 1e-6) == 3);
  CHECK(distinct_eigenvalue_count(h, 1e-12) == 5);
  CHECK(distinct_eigenvalue_count(h, 10.0) == 1);
}

TEST_CASE("support projector spans exactly the large eigenvalue directions") {
  Mat rho = Mat::diag({0.7, 0.3, 0.0});
  Mat p = support_projector(rho);
  CHECK(p(0, 0).real() == doctest::Approx(1.0));
  CHECK(p(1, 1).real() == doctest::Approx(1.0));
  CHECK(std::abs(p(2, 2)) <= 1e-14);
}
