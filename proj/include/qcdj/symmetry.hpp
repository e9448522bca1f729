#pragma once

#include <vector>

#include "qcdj/channels.hpp"
#include "qcdj/matrix.hpp"

namespace qcdj {

/// Average a state on n copies of a d-dimensional factor over all factor
/// permutations. Idempotent; the output commutes with every permutation
/// unitary.
Mat symmetrize_permutation(const Mat& rho, int n, int d);

/// Finite group acting jointly on the tester input, jammer and output wires.
/// Element g carries unitaries (U_A, U_E, V_B).
struct GroupElement {
  Mat u_a;
  Mat u_e;
  Mat v_b;
};

class GroupRepresentation {
 public:
  GroupRepresentation(std::vector<GroupElement> elements, int dim_a, int dim_e, int dim_b);

  const std::vector<GroupElement>& elements() const { return elems_; }
  int dim_a() const { return da_; }
  int dim_e() const { return de_; }
  int dim_b() const { return db_; }

 private:
  std::vector<GroupElement> elems_;
  int da_, de_, db_;
};

/// Whether conjugating c by every group element leaves its Choi matrix
/// unchanged within tol: V_B(g) C((U_A (x) U_E)† X (U_A (x) U_E)) V_B(g)† = C(X).
bool is_jointly_covariant(const Channel& c, const GroupRepresentation& g, double tol = 1e-8);

/// Project jammer states onto the group-twirled family. Both channels must
/// be jointly covariant under g; violations throw.
std::pair<Mat, Mat> group_symmetrize(const Mat& sigma_e, const Mat& omega_e,
                                     const GroupRepresentation& g, const Channel& chan_n,
                                     const Channel& chan_m);

}  // namespace qcdj
