#pragma once

#include <vector>

#include "qcdj/channels.hpp"
#include "qcdj/divergences.hpp"

namespace qcdj {

struct SystemDims {
  int da = 1, de = 1, db = 1, dr = 1;
};

/// One round of the discrimination game: the tester prepares an input on
/// A x R, the jammer feeds E, and either n (null) or m (alternative) acts.
/// n must be trace preserving; m only needs complete positivity.
struct GameInstance {
  Channel n;
  Channel m;
  DivergenceSpec div;
  SystemDims dims;  // dr fixed to da (reference system isomorphic to A)

  // When jammer_sym_copies > 1, the jammer wire is an n-fold power of a
  // jammer_sym_base-dimensional factor and every jammer iterate is projected
  // onto the permutation-invariant states of that power. Requires
  // de == base^copies; the default leaves jammers unrestricted.
  int jammer_sym_copies = 1;
  int jammer_sym_base = 1;

  GameInstance(Channel n_, Channel m_, DivergenceSpec div_);
};

struct ErrorPair {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Worst-case errors of the strategy (rho_ar, test): each jammer supremum
/// collapses to a largest eigenvalue of the induced channel's adjoint
/// applied to the effect.
ErrorPair type_errors(const Channel& n, const Channel& m, const Mat& rho_ar,
                      const Mat& test);

enum class SaddleOrder { SupInf, InfSup };

struct SaddleTracePoint {
  int round = 0;
  double value = 0.0;
  double gap_raw = 0.0;  // duality gap of the Cesaro-averaged iterate
  double gap = 0.0;      // incumbent gap (best point seen so far)
};

struct SaddleSolution {
  double value = 0.0;
  Mat rho_a;    // input marginal at the returned point
  Mat sigma_e;  // jammer against n
  Mat omega_e;  // jammer against m
  double lower = 0.0;  // inf-side best response at the returned point
  double upper = 0.0;  // sup-side best response at the returned point
  double gap = 0.0;    // upper - lower, >= 0 up to solver tolerance
  bool converged = false;
  SaddleOrder order = SaddleOrder::SupInf;
  std::vector<SaddleTracePoint> trace;
};

/// sup over pure inputs on A x R (dR = dA) of D(n(.)||m(.)) for channels
/// without a jammer wire (dE = 1). Multi-start manifold ascent; best-found
/// semantics. `best_input` receives the achieving pure state density matrix.
double best_case_divergence(const Channel& n, const Channel& m,
                            const DivergenceSpec& div, Mat* best_input = nullptr);

/// inf over input pairs (sigma, omega) of D(n(sigma)||m(omega)) for
/// single-slot channels. Jointly convex; entropic descent.
double worst_case_divergence(const Channel& n, const Channel& m,
                             const DivergenceSpec& div, Mat* best_sigma = nullptr,
                             Mat* best_omega = nullptr);

/// Optional starting point for the saddle solvers; members with mismatched
/// dimensions are ignored. The n-fold games seed these with product lifts of
/// single-copy optima before exploring the full space.
struct SaddleWarmStart {
  Mat psi;      // unit column on A x R
  Mat sigma_e;  // jammer against n
  Mat omega_e;  // jammer against m
};

/// Saddle value of the jammed discrimination game in the requested order,
/// with a duality-gap certificate at the returned point.
SaddleSolution minimax_divergence(const GameInstance& g, SaddleOrder order,
                                  const SaddleWarmStart* warm = nullptr);

/// sup-side best response minus inf-side best response at (rho_a, sigma,
/// omega); nonnegative up to solver tolerance, zero exactly at a saddle.
double duality_gap(const GameInstance& g, const Mat& rho_a, const Mat& sigma_e,
                   const Mat& omega_e);

struct Type2ErrorResult {
  double beta = 1.0;
  double divergence = 0.0;  // -log2 beta
  Mat rho_ar;               // achieving pure input on A x R
  Mat sigma_e;              // worst jammer on the null side
  Mat omega_e;              // worst jammer on the alternative side
  Mat test;                 // optimal effect for the achieved point
  bool converged = false;
};

/// Optimal worst-case type-II error at level g.div.epsilon for the n-fold
/// game: inf over pure inputs of sup over jammers of the exact
/// Neyman-Pearson error. Throws when the folded dimensions exceed the cap.
Type2ErrorResult optimal_type2_error(const GameInstance& g, int fold = 1);

/// Dimension guard for tensor-power constructions; QCDJ_DIM_CAP overrides
/// the default of 4096.
int dimension_cap();

}  // namespace qcdj
