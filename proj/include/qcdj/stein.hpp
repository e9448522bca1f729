#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcdj/game.hpp"

namespace qcdj {

/// Saddle value of the n-fold game with its certificate. `value` is the
/// per-copy rate raw / n.
struct PerNValue {
  int n = 1;
  double raw = 0.0;    // D^mx of the n-fold pair, in bits
  double value = 0.0;  // raw / n
  double lower = 0.0;  // inf-side certificate of raw
  double upper = 0.0;  // sup-side certificate of raw
  double gap = 0.0;
  bool converged = false;
};

/// One row of the finite-n testing sandwich at the report's (alpha, epsilon):
/// Renyi rate + penalty/n  <=  testing rate  <=  (entropy rate + h(eps)/n)/(1-eps).
struct SandwichRow {
  int n = 1;
  double lower = 0.0;          // measured-Renyi side including the penalty
  double middle = 0.0;         // hypothesis-testing rate at level epsilon
  double upper = 0.0;          // smoothed relative-entropy side
  double lower_slack = 0.0;    // middle - lower
  double upper_slack = 0.0;    // upper - middle
  double gap_allowance = 0.0;  // certificate gaps feeding this row
  bool ordered = false;        // both slacks >= -gap_allowance
};

/// Per-copy rates of the n-fold games for n = 1..n_max, together with the
/// super-additivity margins and the testing sandwich built from the same
/// chains. The regularized divergence is approached from below by
/// fekete_monotone_sup = max_n value(n).
struct RegularizationReport {
  DivKind kind = DivKind::Umegaki;
  double alpha = 0.0;
  double epsilon = 0.0;
  std::vector<PerNValue> per_n;
  // raw(n) - raw(n-1) - raw(1) for n >= 2; populated for the measured kinds,
  // whose games are super-additive under tensor powers.
  std::vector<double> superadditivity_margins;
  double fekete_monotone_sup = 0.0;
  std::vector<SandwichRow> sandwich;
};

/// Per-copy rates for n = 1..n_max, each n-fold game warm-started from the
/// product lift of the previous solution before full-space refinement.
/// Budgets for n >= 2 are capped internally so the folded solves stay at
/// desk scale; certificates report what the capped runs achieved. Chains at
/// alpha = 1/2 for the measured-Renyi kind run on the sandwiched form, whose
/// value they share exactly (the fidelity measurement is optimal there).
/// With `with_sandwich` set and epsilon in (0,1), alpha in (0,1), the report
/// carries one sandwich row per n. Throws std::invalid_argument for
/// n_max < 1 or a pre-symmetrized game, std::runtime_error when the n_max
/// -fold dimensions exceed the cap.
RegularizationReport regularized_estimate(const GameInstance& g, int n_max,
                                          bool with_sandwich = true);

/// The n-fold game solved twice: jammers unrestricted, then jammers
/// projected onto permutation-invariant states every iterate. The two
/// values agree within max(1e-4, combined gaps) whenever both runs converge.
struct SymmetryReductionReport {
  int n = 2;
  double unrestricted = 0.0;
  double symmetrized = 0.0;
  double unrestricted_gap = 0.0;
  double symmetrized_gap = 0.0;
  double difference = 0.0;  // symmetrized - unrestricted
  double tolerance = 0.0;   // max(1e-4, sum of certificate gaps)
  bool converged = false;   // both runs met their gap target
  bool agrees = false;      // |difference| <= tolerance
};

/// Throws std::invalid_argument for n < 2 or a pre-symmetrized game,
/// std::runtime_error when the folded dimensions exceed the cap.
SymmetryReductionReport verify_symmetry_reduction(const GameInstance& g, int n = 2);

/// One inequality or identity instance run by the lemma suite. Hard checks
/// gate the suite; soft checks are reported only. `slack` is the margin by
/// which the inequality held (negative = violated).
struct LemmaCheck {
  std::string name;
  std::string label;  // "finite-n instance of asymptotic claim" where apt
  int trial = 0;      // 0 is the identical-channel baseline
  bool hard = true;
  bool passed = false;
  double slack = 0.0;
  std::string detail;
};

struct LemmaSuiteReport {
  SystemDims dims;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<LemmaCheck> checks;
  int hard_violations = 0;
  int soft_flags = 0;
  // Gap between the measured divergence and its best Renyi grid value,
  // maximized over the instances that ran the grid; the grid cannot witness
  // exact equality, only a small residual.
  double alpha_grid_max_residual = 0.0;
  bool all_passed() const { return hard_violations == 0; }
};

/// Runs the inequality suite on `trials` random channel pairs of the given
/// dimensions plus an identical-channel baseline (trial 0). State-level
/// checks run on every trial; the n-fold solver checks run on the baseline
/// and the first two random trials, and each entry names its trial. Failures
/// are collected in the report, never thrown. Deterministic in
/// (dims, trials, seed): trials draw from independent per-trial RNG streams,
/// so running them on several threads reorders nothing in the report.
/// trials = 0 yields an empty report.
LemmaSuiteReport verify_lemma_suite(const SystemDims& dims, int trials,
                                    std::uint64_t seed, int threads = 1);

}  // namespace qcdj
