#pragma once

#include <cstdint>
#include <optional>

#include "qcdj/matrix.hpp"

namespace qcdj {

enum class DivKind { Umegaki, PetzRenyi, SandwichedRenyi, HypothesisTesting, Measured, MeasuredRenyi };

/// Shared optimizer knobs. `clamp_bits` caps objective values during
/// optimization only; reported values are unclamped.
struct SolverOptions {
  double tol = 1e-7;
  double gap_tol = 1e-5;  // duality-gap target for saddle solvers
  int max_iters = 400;
  int restarts = 6;
  std::uint64_t seed = 1234;
  double clamp_bits = 60.0;
  int outer_iters = 40;  // best-response sweeps per start in the saddle solvers
  int fp_rounds = 24;    // averaging rounds refining the saddle certificate
};

struct DivergenceSpec {
  DivKind kind = DivKind::Umegaki;
  double alpha = 0.5;    // Renyi order; must not be 1
  double epsilon = 0.1;  // testing level in [0, 1]
  SolverOptions solver;
};

/// All divergences are reported in bits.
double binary_entropy(double eps);

/// Whether the support of rho sits inside the support of sigma, using the
/// shared eigenvalue threshold rule.
bool support_within(const Mat& rho, const Mat& sigma);

double umegaki(const Mat& rho, const Mat& sigma);
double petz_renyi(double alpha, const Mat& rho, const Mat& sigma);
double sandwiched_renyi(double alpha, const Mat& rho, const Mat& sigma);

struct TestingResult {
  double beta = 0.0;
  double divergence = 0.0;  // -log2 beta, +inf when beta = 0
  Mat optimal_effect;
  double threshold = 0.0;  // t in the Neyman-Pearson test
  double gamma = 0.0;      // randomization weight on the zero eigenspace
};

/// Exact optimal type-II error: minimize tr[sigma M] over 0 <= M <= I with
/// tr[rho (I - M)] <= eps. Solved through the Neyman-Pearson structure
/// M = P_+(rho - t sigma) + gamma P_0(rho - t sigma) with t located by
/// bisection on the accepted rho-mass and gamma closing the constraint
/// exactly. sigma may be subnormalized.
TestingResult hypothesis_testing(double eps, const Mat& rho, const Mat& sigma);

struct VariationalResult {
  double value = 0.0;  // certified lower bound, bits
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // last relative improvement seen by the ascent
  Mat maximizer;          // witness (Measured) or measurement basis (MeasuredRenyi)
};

/// Lower bound on the measured relative entropy via ascent over positive
/// definite witnesses of tr[rho log w] + 1 - tr[sigma w]. `init` seeds the
/// first restart with a known-good witness.
VariationalResult measured_relative_entropy(const Mat& rho, const Mat& sigma,
                                            const SolverOptions& opts,
                                            const Mat* init = nullptr);

/// Lower bound on the measured Renyi divergence, alpha in (0,1), via
/// Riemannian ascent over rank-one projective measurement bases. `init`
/// seeds the first restart with a known-good basis.
VariationalResult measured_renyi(double alpha, const Mat& rho, const Mat& sigma,
                                 const SolverOptions& opts, const Mat* init = nullptr);

/// Dispatch on spec.kind; returns the value only.
double evaluate_divergence(const DivergenceSpec& spec, const Mat& rho, const Mat& sigma);

}  // namespace qcdj
