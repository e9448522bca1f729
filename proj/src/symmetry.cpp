#include "qcdj/symmetry.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "qcdj/linalg.hpp"

namespace qcdj {

Mat symmetrize_permutation(const Mat& rho, int n, int d) {
  int total = 1;
  for (int i = 0; i < n; ++i) total *= d;
  if (!rho.square() || rho.rows() != total)
    throw std::invalid_argument("symmetrize_permutation: size mismatch");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Mat acc(total, total);
  int count = 0;
  do {
    const Mat u = permutation_unitary(n, d, perm);
    acc += u * rho * u.dagger();
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  acc *= cx(1.0 / count);
  return acc.hermitized();
}

GroupRepresentation::GroupRepresentation(std::vector<GroupElement> elements, int dim_a,
                                         int dim_e, int dim_b)
    : elems_(std::move(elements)), da_(dim_a), de_(dim_e), db_(dim_b) {
  if (elems_.empty()) throw std::invalid_argument("GroupRepresentation: empty element list");
  auto check_unitary = [](const Mat& u, int d) {
    if (!u.square() || u.rows() != d)
      throw std::invalid_argument("GroupRepresentation: element size mismatch");
    Mat r = u.dagger() * u;
    r -= Mat::identity(d);
    if (r.max_abs() > 1e-10)
      throw std::invalid_argument("GroupRepresentation: element is not unitary");
  };
  for (const auto& g : elems_) {
    check_unitary(g.u_a, da_);
    check_unitary(g.u_e, de_);
    check_unitary(g.v_b, db_);
  }
  // Closure on the jammer wire up to phase: each product must match some
  // stored element. The jammer action is what the twirl below uses.
  for (const auto& g : elems_)
    for (const auto& h : elems_) {
      const Mat prod = g.u_e * h.u_e;
      bool found = false;
      for (const auto& k : elems_) {
        const cx ip = hs_inner(k.u_e, prod);
        if (std::abs(std::abs(ip) - static_cast<double>(de_)) < 1e-8 * de_) {
          found = true;
          break;
        }
      }
      if (!found)
        throw std::invalid_argument("GroupRepresentation: jammer action not closed under products");
    }
}

bool is_jointly_covariant(const Channel& c, const GroupRepresentation& g, double tol) {
  if (c.dim_a() != g.dim_a() || c.dim_e() != g.dim_e() || c.dim_b() != g.dim_b())
    throw std::invalid_argument("is_jointly_covariant: dimension mismatch");
  const Mat& ref = c.choi();
  const double scale = std::max(1.0, ref.max_abs());
  for (const auto& el : g.elements()) {
    const Mat u = kron(el.u_a, el.u_e);
    std::vector<Mat> ks;
    ks.reserve(c.kraus().size());
    for (const auto& k : c.kraus()) ks.push_back(el.v_b * k * u.dagger());
    const Channel conj(c.dim_a(), c.dim_e(), c.dim_b(), std::move(ks), false);
    Mat d = conj.choi() - ref;
    if (d.max_abs() > tol * scale) return false;
  }
  return true;
}

std::pair<Mat, Mat> group_symmetrize(const Mat& sigma_e, const Mat& omega_e,
                                     const GroupRepresentation& g, const Channel& chan_n,
                                     const Channel& chan_m) {
  if (!is_jointly_covariant(chan_n, g) || !is_jointly_covariant(chan_m, g))
    throw std::invalid_argument("group_symmetrize: channels are not jointly covariant under g");
  auto twirl = [&](const Mat& x) {
    Mat acc(x.rows(), x.cols());
    for (const auto& el : g.elements()) acc += el.u_e * x * el.u_e.dagger();
    acc *= cx(1.0 / static_cast<double>(g.elements().size()));
    return acc.hermitized();
  };
  return {twirl(sigma_e), twirl(omega_e)};
}

}  // namespace qcdj
