#pragma once

#include <functional>
#include <vector>

#include "qcdj/matrix.hpp"

namespace qcdj {

/// Eigenvalues in descending order; column k of `vectors` pairs with `values[k]`.
struct HermitianEig {
  std::vector<double> values;
  Mat vectors;
};

/// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
/// The input is symmetrized as (H + H†)/2 before iterating.
HermitianEig hermitian_eig(const Mat& h);

/// Eigenvalue threshold below which a PSD matrix eigenvalue counts as zero.
double support_threshold(double lambda_max);

/// Apply a scalar function to a Hermitian matrix through its eigenvalues.
/// With on_support set, eigenvalues at or below the support threshold map to
/// zero instead of passing through f. Throws std::domain_error when f yields
/// a non-finite value on an eigenvalue that is not filtered out.
Mat matrix_fn(const Mat& h, const std::function<double(double)>& f, bool on_support = false);

/// Natural log on the support (pseudo-log); zero eigenvalues map to zero.
Mat matrix_log_support(const Mat& h);

/// Power on the support; zero eigenvalues map to zero for any exponent.
Mat matrix_pow_support(const Mat& h, double p);

/// exp of a Hermitian matrix.
Mat matrix_exp(const Mat& h);

/// Projector onto the span of eigenvectors above the support threshold.
Mat support_projector(const Mat& h);

/// Operator norm of a Hermitian matrix (largest |eigenvalue|).
double op_norm(const Mat& h);

/// Partial trace over the factors not listed in `keep`. The matrix lives on
/// the tensor product of `dims` factors, first factor most significant.
Mat partial_trace(const Mat& x, const std::vector<int>& dims, const std::vector<int>& keep);

/// Reorder tensor factors: output factor j is input factor src[j].
Mat permute_systems(const Mat& x, const std::vector<int>& dims, const std::vector<int>& src);

/// Vector reordering matrix P with P (v in `dims` order) = v in src-reordered
/// order, i.e. output factor j is input factor src[j].
Mat permute_systems_matrix(const std::vector<int>& dims, const std::vector<int>& src);

/// Unitary representation of a permutation on n factors of dimension d.
/// perm[j] is the destination slot of factor j, so the map is a group
/// homomorphism: permutation_unitary(pi) * permutation_unitary(tau) equals
/// permutation_unitary(pi o tau) with tau applied first.
Mat permutation_unitary(int n, int d, const std::vector<int>& perm);

/// Number of eigenvalue clusters under single-linkage grouping at `tol`.
int distinct_eigenvalue_count(const Mat& h, double tol);

}  // namespace qcdj
