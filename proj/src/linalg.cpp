#include "qcdj/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qcdj {

namespace {

// One two-sided Jacobi rotation zeroing a(p,q). The plane rotation is
//   J(p,p)=c, J(p,q)=-s*u, J(q,p)=s*conj(u), J(q,q)=c, u = a_pq/|a_pq|,
// applied as A <- J† A J, V <- V J.
void jacobi_rotate(Mat& a, Mat& v, int p, int q) {
  const int n = a.rows();
  const cx apq = a(p, q);
  const double m = std::abs(apq);
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double tau = (aqq - app) / (2.0 * m);
  const double sgn = tau >= 0.0 ? 1.0 : -1.0;
  const double t = -sgn / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const cx u = apq / m;
  const cx su = s * u;
  const cx suc = s * std::conj(u);

  for (int k = 0; k < n; ++k) {  // A <- A J
    const cx akp = a(k, p), akq = a(k, q);
    a(k, p) = c * akp + suc * akq;
    a(k, q) = -su * akp + c * akq;
  }
  for (int k = 0; k < n; ++k) {  // A <- J† A
    const cx apk = a(p, k), aqk = a(q, k);
    a(p, k) = c * apk + su * aqk;
    a(q, k) = -suc * apk + c * aqk;
  }
  for (int k = 0; k < n; ++k) {  // V <- V J
    const cx vkp = v(k, p), vkq = v(k, q);
    v(k, p) = c * vkp + suc * vkq;
    v(k, q) = -su * vkp + c * vkq;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
}

}  // namespace

HermitianEig hermitian_eig(const Mat& h) {
  if (!h.square()) throw std::invalid_argument("hermitian_eig: matrix must be square");
  if (!h.finite()) throw std::invalid_argument("hermitian_eig: non-finite entries");
  const int n = h.rows();
  Mat a = h.hermitized();
  Mat v = Mat::identity(n);

  const double scale = std::max(1e-300, a.max_abs());
  const double stop = 1e-15 * scale;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= stop) break;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q)
        if (std::abs(a(p, q)) > stop * 0.1) jacobi_rotate(a, v, p, q);
  }

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = a(i, i).real();
  std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) { return diag[i] > diag[j]; });

  HermitianEig out;
  out.values.resize(n);
  out.vectors = Mat(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = diag[idx[k]];
    for (int i = 0; i < n; ++i) out.vectors(i, k) = v(i, idx[k]);
  }
  return out;
}

double support_threshold(double lambda_max) { return std::max(1e-12, 1e-12 * lambda_max); }

Mat matrix_fn(const Mat& h, const std::function<double(double)>& f, bool on_support) {
  const HermitianEig e = hermitian_eig(h);
  const int n = h.rows();
  const double th = support_threshold(e.values.empty() ? 0.0 : e.values.front());
  std::vector<double> fv(n);
  for (int i = 0; i < n; ++i) {
    if (on_support && e.values[i] <= th) {
      fv[i] = 0.0;
      continue;
    }
    const double y = f(e.values[i]);
    if (!std::isfinite(y))
      throw std::domain_error("matrix_fn: function undefined on an eigenvalue above the support threshold");
    fv[i] = y;
  }
  Mat r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cx s = 0.0;
      for (int k = 0; k < n; ++k)
        s += e.vectors(i, k) * fv[k] * std::conj(e.vectors(j, k));
      r(i, j) = s;
    }
  return r;
}

Mat matrix_log_support(const Mat& h) {
  return matrix_fn(h, [](double x) { return std::log(x); }, true);
}

Mat matrix_pow_support(const Mat& h, double p) {
  return matrix_fn(h, [p](double x) { return std::pow(x, p); }, true);
}

Mat matrix_exp(const Mat& h) {
  return matrix_fn(h, [](double x) { return std::exp(x); }, false);
}

Mat support_projector(const Mat& h) {
  const HermitianEig e = hermitian_eig(h);
  const int n = h.rows();
  const double th = support_threshold(e.values.empty() ? 0.0 : e.values.front());
  Mat r(n, n);
  for (int k = 0; k < n; ++k) {
    if (e.values[k] <= th) continue;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        r(i, j) += e.vectors(i, k) * std::conj(e.vectors(j, k));
  }
  return r;
}

double op_norm(const Mat& h) {
  const HermitianEig e = hermitian_eig(h);
  double m = 0.0;
  for (double x : e.values) m = std::max(m, std::abs(x));
  return m;
}

namespace {

int dims_product(const std::vector<int>& dims) {
  int p = 1;
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("tensor factor dimensions must be positive");
    p *= d;
  }
  return p;
}

}  // namespace

Mat partial_trace(const Mat& x, const std::vector<int>& dims, const std::vector<int>& keep) {
  const int total = dims_product(dims);
  if (!x.square() || x.rows() != total)
    throw std::invalid_argument("partial_trace: matrix size does not match dims");
  const int m = static_cast<int>(dims.size());
  std::vector<bool> kept(m, false);
  for (int k : keep) {
    if (k < 0 || k >= m) throw std::invalid_argument("partial_trace: keep index out of range");
    if (kept[k]) throw std::invalid_argument("partial_trace: duplicate keep index");
    kept[k] = true;
  }

  std::vector<int> stride(m, 1);
  for (int i = m - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

  std::vector<int> kfac, tfac;
  for (int i = 0; i < m; ++i) (kept[i] ? kfac : tfac).push_back(i);

  int dk = 1;
  for (int i : kfac) dk *= dims[i];
  int dt = 1;
  for (int i : tfac) dt *= dims[i];

  // Flat offsets for every kept and traced multi-index.
  auto offsets = [&](const std::vector<int>& fac, int count) {
    std::vector<int> off(count, 0);
    for (int v = 0; v < count; ++v) {
      int rem = v;
      for (int i = static_cast<int>(fac.size()) - 1; i >= 0; --i) {
        const int f = fac[i];
        off[v] += (rem % dims[f]) * stride[f];
        rem /= dims[f];
      }
    }
    return off;
  };
  const std::vector<int> koff = offsets(kfac, dk);
  const std::vector<int> toff = offsets(tfac, dt);

  Mat r(dk, dk);
  for (int i = 0; i < dk; ++i)
    for (int j = 0; j < dk; ++j) {
      cx s = 0.0;
      for (int t = 0; t < dt; ++t) s += x(koff[i] + toff[t], koff[j] + toff[t]);
      r(i, j) = s;
    }
  return r;
}

Mat permute_systems_matrix(const std::vector<int>& dims, const std::vector<int>& src) {
  const int m = static_cast<int>(dims.size());
  if (static_cast<int>(src.size()) != m)
    throw std::invalid_argument("permute_systems: src length mismatch");
  std::vector<bool> seen(m, false);
  for (int s : src) {
    if (s < 0 || s >= m || seen[s]) throw std::invalid_argument("permute_systems: src is not a permutation");
    seen[s] = true;
  }
  const int total = dims_product(dims);

  std::vector<int> stride(m, 1);
  for (int i = m - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];
  std::vector<int> odims(m);
  for (int j = 0; j < m; ++j) odims[j] = dims[src[j]];
  std::vector<int> ostride(m, 1);
  for (int i = m - 2; i >= 0; --i) ostride[i] = ostride[i + 1] * odims[i + 1];

  Mat p(total, total);
  std::vector<int> mi(m);
  for (int b = 0; b < total; ++b) {
    int rem = b;
    for (int i = 0; i < m; ++i) {
      mi[i] = rem / stride[i];
      rem %= stride[i];
    }
    int ob = 0;
    for (int j = 0; j < m; ++j) ob += mi[src[j]] * ostride[j];
    p(ob, b) = 1.0;
  }
  return p;
}

Mat permute_systems(const Mat& x, const std::vector<int>& dims, const std::vector<int>& src) {
  const Mat p = permute_systems_matrix(dims, src);
  return p * x * p.dagger();
}

Mat permutation_unitary(int n, int d, const std::vector<int>& perm) {
  if (n <= 0 || d <= 0) throw std::invalid_argument("permutation_unitary: bad sizes");
  if (static_cast<int>(perm.size()) != n)
    throw std::invalid_argument("permutation_unitary: perm length mismatch");
  // Destination-slot convention: factor j lands in slot perm[j]. In the
  // permute_systems source convention that means src[perm[j]] = j.
  std::vector<int> src(n, -1);
  for (int j = 0; j < n; ++j) {
    if (perm[j] < 0 || perm[j] >= n || src[perm[j]] != -1)
      throw std::invalid_argument("permutation_unitary: perm is not a permutation");
    src[perm[j]] = j;
  }
  return permute_systems_matrix(std::vector<int>(n, d), src);
}

int distinct_eigenvalue_count(const Mat& h, double tol) {
  const HermitianEig e = hermitian_eig(h);
  if (e.values.empty()) return 0;
  int count = 1;
  for (std::size_t i = 1; i < e.values.size(); ++i)
    if (e.values[i - 1] - e.values[i] > tol) ++count;
  return count;
}

}  // namespace qcdj
