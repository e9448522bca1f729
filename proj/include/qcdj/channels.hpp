#pragma once

#include <memory>
#include <mutex>
#include <vector>

#include "qcdj/matrix.hpp"

namespace qcdj {

/// Completely positive map from A x E to B in Kraus form. Kraus operators
/// are dim_b x (dim_a * dim_e) with the A factor most significant on the
/// input wire. Single-input channels set dim_e = 1. The Choi matrix is
/// computed on first use and cached.
class Channel {
 public:
  Channel() = default;
  Channel(int dim_a, int dim_e, int dim_b, std::vector<Mat> kraus, bool trace_preserving);
  Channel(const Channel& o);
  Channel& operator=(const Channel& o);

  int dim_a() const { return da_; }
  int dim_e() const { return de_; }
  int dim_b() const { return db_; }
  int dim_in() const { return da_ * de_; }
  bool trace_preserving() const { return tp_; }
  const std::vector<Mat>& kraus() const { return kraus_; }

  /// Choi matrix sum_ij |i><j| (x) C(|i><j|), input factor most significant,
  /// size (dim_in * dim_b)^2.
  const Mat& choi() const;

  /// C(x) for x on A x E.
  Mat apply(const Mat& x) const;

  /// (C (x) id_R)(x) for x ordered (A, E, R); output ordered (B, R).
  Mat apply_with_ref(const Mat& x, int dim_r) const;

  /// Adjoint map on effects: sum_k K† y K.
  Mat apply_adjoint(const Mat& y) const;

  /// Rebuild a Kraus form from a Choi matrix. Throws when the Choi matrix
  /// fails complete positivity beyond tolerance.
  static Channel from_choi(int dim_a, int dim_e, int dim_b, const Mat& choi,
                           bool trace_preserving);

  /// Residual of the trace-preserving condition sum_k K† K = I.
  double tp_residual() const;

 private:
  int da_ = 1, de_ = 1, db_ = 1;
  std::vector<Mat> kraus_;
  bool tp_ = true;

  mutable std::mutex choi_mu_;
  mutable std::shared_ptr<const Mat> choi_cache_;
};

/// Tensor product state (rho_AR (x) sigma_E) reordered to (A, E, R) so a
/// Channel on (A, E) with an identity reference wire can consume it.
Mat assemble_input(const Mat& rho_ar, int dim_a, int dim_r, const Mat& sigma_e);

/// Fix the jammer marginal: resulting single-input channel A -> B.
Channel induced_fix_jammer(const Channel& c, const Mat& sigma_e);

/// Fix the tester input (a state on A x R): resulting single-input channel
/// E -> B x R.
Channel induced_fix_input(const Channel& c, const Mat& rho_ar, int dim_r);

/// n-fold tensor power acting on grouped wires (A1..An, E1..En) ->
/// (B1..Bn). Kraus operators absorb the grouped-to-interleaved reshuffle.
Channel tensor_channel(const Channel& c, int n);

/// The reshuffle used by tensor_channel: maps vectors ordered
/// (A1..An, E1..En) to (A1, E1, .., An, En).
Mat grouped_to_interleaved(int n, int dim_a, int dim_e);

Channel random_cptp(int dim_a, int dim_e, int dim_b, int kraus_count, class Rng& rng);

}  // namespace qcdj
