#include "qcdj/channels.hpp"

#include <cmath>
#include <stdexcept>

#include "qcdj/linalg.hpp"
#include "qcdj/rng.hpp"

namespace qcdj {

Channel::Channel(int dim_a, int dim_e, int dim_b, std::vector<Mat> kraus, bool trace_preserving)
    : da_(dim_a), de_(dim_e), db_(dim_b), kraus_(std::move(kraus)), tp_(trace_preserving) {
  if (da_ <= 0 || de_ <= 0 || db_ <= 0) throw std::invalid_argument("Channel: bad dimensions");
  if (kraus_.empty()) throw std::invalid_argument("Channel: empty Kraus list");
  for (const auto& k : kraus_) {
    if (k.rows() != db_ || k.cols() != da_ * de_)
      throw std::invalid_argument("Channel: Kraus operator shape mismatch");
    if (!k.finite()) throw std::invalid_argument("Channel: non-finite Kraus entries");
  }
  if (tp_ && tp_residual() > 1e-8)
    throw std::invalid_argument("Channel: marked trace preserving but sum K†K differs from I");
}

double Channel::tp_residual() const {
  Mat s(dim_in(), dim_in());
  for (const auto& k : kraus_) s += k.dagger() * k;
  s -= Mat::identity(dim_in());
  return s.max_abs();
}

Channel::Channel(const Channel& o)
    : da_(o.da_), de_(o.de_), db_(o.db_), kraus_(o.kraus_), tp_(o.tp_) {
  std::lock_guard<std::mutex> lock(o.choi_mu_);
  choi_cache_ = o.choi_cache_;
}

Channel& Channel::operator=(const Channel& o) {
  if (this == &o) return *this;
  da_ = o.da_;
  de_ = o.de_;
  db_ = o.db_;
  kraus_ = o.kraus_;
  tp_ = o.tp_;
  std::scoped_lock lock(choi_mu_, o.choi_mu_);
  choi_cache_ = o.choi_cache_;
  return *this;
}

const Mat& Channel::choi() const {
  std::lock_guard<std::mutex> lock(choi_mu_);
  if (!choi_cache_) {
    const int din = dim_in();
    Mat j(din * db_, din * db_);
    for (const auto& k : kraus_) {
      Mat w(din * db_, 1);
      for (int i = 0; i < din; ++i)
        for (int a = 0; a < db_; ++a) w(i * db_ + a, 0) = k(a, i);
      j += outer(w, w);
    }
    choi_cache_ = std::make_shared<const Mat>(std::move(j));
  }
  return *choi_cache_;
}

Mat Channel::apply(const Mat& x) const {
  if (x.rows() != dim_in() || x.cols() != dim_in())
    throw std::invalid_argument("Channel::apply: input size mismatch");
  Mat y(db_, db_);
  for (const auto& k : kraus_) y += k * x * k.dagger();
  return y;
}

Mat Channel::apply_with_ref(const Mat& x, int dim_r) const {
  if (dim_r == 1) return apply(x);
  const int din = dim_in() * dim_r;
  if (x.rows() != din || x.cols() != din)
    throw std::invalid_argument("Channel::apply_with_ref: input size mismatch");
  const Mat ir = Mat::identity(dim_r);
  Mat y(db_ * dim_r, db_ * dim_r);
  for (const auto& k : kraus_) {
    const Mat kr = kron(k, ir);
    y += kr * x * kr.dagger();
  }
  return y;
}

Mat Channel::apply_adjoint(const Mat& y) const {
  if (y.rows() != db_ || y.cols() != db_)
    throw std::invalid_argument("Channel::apply_adjoint: effect size mismatch");
  Mat x(dim_in(), dim_in());
  for (const auto& k : kraus_) x += k.dagger() * y * k;
  return x;
}

Channel Channel::from_choi(int dim_a, int dim_e, int dim_b, const Mat& choi,
                           bool trace_preserving) {
  const int din = dim_a * dim_e;
  if (!choi.square() || choi.rows() != din * dim_b)
    throw std::invalid_argument("Channel::from_choi: Choi matrix size mismatch");
  const auto e = hermitian_eig(choi);
  const double lmax = std::max(e.values.empty() ? 0.0 : e.values.front(), 0.0);
  if (e.values.back() < -1e-8 * std::max(1.0, lmax))
    throw std::invalid_argument("Channel::from_choi: Choi matrix is not completely positive");
  const double th = support_threshold(lmax);
  std::vector<Mat> kraus;
  for (std::size_t l = 0; l < e.values.size(); ++l) {
    if (e.values[l] <= th) continue;
    const double s = std::sqrt(e.values[l]);
    Mat k(dim_b, din);
    for (int i = 0; i < din; ++i)
      for (int a = 0; a < dim_b; ++a)
        k(a, i) = s * e.vectors(i * dim_b + a, static_cast<int>(l));
    kraus.push_back(std::move(k));
  }
  if (kraus.empty()) throw std::invalid_argument("Channel::from_choi: zero map");
  return Channel(dim_a, dim_e, dim_b, std::move(kraus), trace_preserving);
}

Mat assemble_input(const Mat& rho_ar, int dim_a, int dim_r, const Mat& sigma_e) {
  const int de = sigma_e.rows();
  if (rho_ar.rows() != dim_a * dim_r)
    throw std::invalid_argument("assemble_input: rho size mismatch");
  if (de == 1) return rho_ar * sigma_e(0, 0);
  const Mat prod = kron(rho_ar, sigma_e);  // ordered (A, R, E)
  return permute_systems(prod, {dim_a, dim_r, de}, {0, 2, 1});
}

Channel induced_fix_jammer(const Channel& c, const Mat& sigma_e) {
  if (sigma_e.rows() != c.dim_e() || !sigma_e.square())
    throw std::invalid_argument("induced_fix_jammer: sigma size mismatch");
  if (c.dim_e() == 1) {
    std::vector<Mat> ks;
    const double s = std::sqrt(std::max(sigma_e(0, 0).real(), 0.0));
    for (const auto& k : c.kraus()) ks.push_back(k * s);
    return Channel(c.dim_a(), 1, c.dim_b(), std::move(ks), c.trace_preserving() && std::abs(sigma_e(0, 0) - cx(1.0)) < 1e-10);
  }
  const auto e = hermitian_eig(sigma_e);
  const double th = support_threshold(std::max(e.values.front(), 0.0));
  std::vector<Mat> ks;
  for (int m = 0; m < c.dim_e(); ++m) {
    if (e.values[m] <= th) continue;
    const double s = std::sqrt(e.values[m]);
    // Embed |a> -> |a> (x) |u_m>, then apply each Kraus operator.
    Mat emb(c.dim_in(), c.dim_a());
    for (int a = 0; a < c.dim_a(); ++a)
      for (int ee = 0; ee < c.dim_e(); ++ee) emb(a * c.dim_e() + ee, a) = s * e.vectors(ee, m);
    for (const auto& k : c.kraus()) ks.push_back(k * emb);
  }
  if (ks.empty()) throw std::invalid_argument("induced_fix_jammer: sigma has empty support");
  const bool tp = c.trace_preserving() && std::abs(sigma_e.trace() - cx(1.0)) < 1e-9;
  return Channel(c.dim_a(), 1, c.dim_b(), std::move(ks), tp);
}

Channel induced_fix_input(const Channel& c, const Mat& rho_ar, int dim_r) {
  const int da = c.dim_a(), de = c.dim_e(), db = c.dim_b();
  if (rho_ar.rows() != da * dim_r || !rho_ar.square())
    throw std::invalid_argument("induced_fix_input: rho size mismatch");
  const auto e = hermitian_eig(rho_ar);
  const double th = support_threshold(std::max(e.values.front(), 0.0));
  // P reorders (A, R, E) to (A, E, R); the embedded vector w_m rides on (A, R).
  const Mat p = permute_systems_matrix({da, dim_r, de}, {0, 2, 1});
  const Mat ir = Mat::identity(dim_r);
  std::vector<Mat> ks;
  for (int m = 0; m < da * dim_r; ++m) {
    if (e.values[m] <= th) continue;
    const double s = std::sqrt(e.values[m]);
    Mat emb(da * dim_r * de, de);  // |e> -> w_m (x) |e>, ordered (A, R, E)
    for (int ar = 0; ar < da * dim_r; ++ar)
      for (int ee = 0; ee < de; ++ee) emb(ar * de + ee, ee) = s * e.vectors(ar, m);
    const Mat pre = p * emb;  // now ordered (A, E, R)
    for (const auto& k : c.kraus()) ks.push_back(kron(k, ir) * pre);
  }
  if (ks.empty()) throw std::invalid_argument("induced_fix_input: rho has empty support");
  const bool tp = c.trace_preserving() && std::abs(rho_ar.trace() - cx(1.0)) < 1e-9;
  return Channel(de, 1, db * dim_r, std::move(ks), tp);
}

Mat grouped_to_interleaved(int n, int dim_a, int dim_e) {
  std::vector<int> dims(2 * n);
  for (int i = 0; i < n; ++i) dims[i] = dim_a;
  for (int i = 0; i < n; ++i) dims[n + i] = dim_e;
  std::vector<int> src(2 * n);
  for (int m = 0; m < n; ++m) {
    src[2 * m] = m;
    src[2 * m + 1] = n + m;
  }
  return permute_systems_matrix(dims, src);
}

Channel tensor_channel(const Channel& c, int n) {
  if (n < 1) throw std::invalid_argument("tensor_channel: n must be at least 1");
  if (n == 1) return c;
  const Mat p = grouped_to_interleaved(n, c.dim_a(), c.dim_e());
  std::vector<Mat> ks;
  std::vector<int> pick(n, 0);
  const int kc = static_cast<int>(c.kraus().size());
  while (true) {
    Mat k = c.kraus()[pick[0]];
    for (int i = 1; i < n; ++i) k = kron(k, c.kraus()[pick[i]]);
    ks.push_back(k * p);
    int i = n - 1;
    while (i >= 0 && ++pick[i] == kc) pick[i--] = 0;
    if (i < 0) break;
  }
  int dan = 1, den = 1, dbn = 1;
  for (int i = 0; i < n; ++i) {
    dan *= c.dim_a();
    den *= c.dim_e();
    dbn *= c.dim_b();
  }
  return Channel(dan, den, dbn, std::move(ks), c.trace_preserving());
}

Channel random_cptp(int dim_a, int dim_e, int dim_b, int kraus_count, Rng& rng) {
  const int din = dim_a * dim_e;
  if (kraus_count * dim_b < din)
    throw std::invalid_argument("random_cptp: kraus_count * dim_b must reach the input dimension");
  // Random isometry via Gram-Schmidt on Gaussian columns.
  Mat v(kraus_count * dim_b, din);
  for (int j = 0; j < din; ++j) {
    Mat col(kraus_count * dim_b, 1);
    for (int i = 0; i < v.rows(); ++i) col(i, 0) = rng.cgauss();
    for (int prev = 0; prev < j; ++prev) {
      cx ip = 0.0;
      for (int i = 0; i < v.rows(); ++i) ip += std::conj(v(i, prev)) * col(i, 0);
      for (int i = 0; i < v.rows(); ++i) col(i, 0) -= ip * v(i, prev);
    }
    const double nrm = col.norm_fro();
    for (int i = 0; i < v.rows(); ++i) v(i, j) = col(i, 0) / nrm;
  }
  std::vector<Mat> ks(kraus_count, Mat(dim_b, din));
  for (int k = 0; k < kraus_count; ++k)
    for (int a = 0; a < dim_b; ++a)
      for (int j = 0; j < din; ++j) ks[k](a, j) = v(k * dim_b + a, j);
  return Channel(dim_a, dim_e, dim_b, std::move(ks), true);
}

}  // namespace qcdj
