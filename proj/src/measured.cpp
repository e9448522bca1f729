#include <cmath>
#include <limits>
#include <stdexcept>

#include "qcdj/calculus.hpp"
#include "qcdj/divergences.hpp"
#include "qcdj/linalg.hpp"
#include "qcdj/rng.hpp"

namespace qcdj {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.69314718055994530941723212145818;
constexpr double kEigFloor = 1e-12;

Mat random_unitary(int d, Rng& rng) {
  Mat v(d, d);
  for (int j = 0; j < d; ++j) {
    Mat col(d, 1);
    for (int i = 0; i < d; ++i) col(i, 0) = rng.cgauss();
    for (int prev = 0; prev < j; ++prev) {
      cx ip = 0.0;
      for (int i = 0; i < d; ++i) ip += std::conj(v(i, prev)) * col(i, 0);
      for (int i = 0; i < d; ++i) col(i, 0) -= ip * v(i, prev);
    }
    const double nrm = col.norm_fro();
    for (int i = 0; i < d; ++i) v(i, j) = col(i, 0) / std::max(nrm, 1e-30);
  }
  return v;
}

// Eigenbasis of log rho - log sigma (on supports); the classical optimum in
// that basis is the standard warm start for both measured ascents.
Mat relative_log_basis(const Mat& rho, const Mat& sigma) {
  const Mat delta = matrix_log_support(rho) - matrix_log_support(sigma);
  return hermitian_eig(delta).vectors;
}

// Clamp a Hermitian candidate onto the positive cone, keeping it well
// conditioned for the log.
Mat clamp_pd(const Mat& w, double floor_scale) {
  const auto e = hermitian_eig(w);
  const int d = w.rows();
  const double fl = floor_scale * std::max(1.0, e.values.front());
  Mat r(d, d);
  for (int k = 0; k < d; ++k) {
    const double lam = std::max(e.values[k], fl);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        r(i, j) += e.vectors(i, k) * lam * std::conj(e.vectors(j, k));
  }
  return r.hermitized();
}

struct WitnessEval {
  double objective = 0.0;  // tr[rho ln w] + 1 - tr[sigma w], nats
  double bits = 0.0;       // scale-invariant value tr[rho ln w] - ln tr[sigma w], in bits
  HermitianEig eig;
};

WitnessEval eval_witness(const Mat& rho, const Mat& sigma, const Mat& w) {
  WitnessEval out;
  out.eig = hermitian_eig(w);
  double t1 = 0.0;
  for (int k = 0; k < w.rows(); ++k) {
    const double lam = std::max(out.eig.values[k], kEigFloor);
    t1 += std::log(lam) * [&] {
      cx q = 0.0;
      for (int i = 0; i < w.rows(); ++i) {
        cx row = 0.0;
        for (int j = 0; j < w.rows(); ++j) row += rho(i, j) * out.eig.vectors(j, k);
        q += std::conj(out.eig.vectors(i, k)) * row;
      }
      return q.real();
    }();
  }
  const double t2 = real_trace_prod(sigma, w);
  out.objective = t1 + 1.0 - t2;
  out.bits = (t1 - std::log(std::max(t2, 1e-300))) / kLn2;
  return out;
}

}  // namespace

VariationalResult measured_relative_entropy(const Mat& rho, const Mat& sigma,
                                            const SolverOptions& opts, const Mat* init) {
  if (!rho.square() || rho.rows() != sigma.rows())
    throw std::invalid_argument("measured_relative_entropy: dimension mismatch");
  VariationalResult best;
  best.value = -kInf;
  if (!support_within(rho, sigma)) {
    best.value = kInf;
    best.converged = true;
    return best;
  }
  const int d = rho.rows();

  // Warm start: classical optimum p/q measured in the eigenbasis of
  // log rho - log sigma.
  const Mat basis = relative_log_basis(rho, sigma);
  Mat w0(d, d);
  for (int k = 0; k < d; ++k) {
    Mat u(d, 1);
    for (int i = 0; i < d; ++i) u(i, 0) = basis(i, k);
    const double p = real_trace_prod(outer(u, u), rho);
    const double q = real_trace_prod(outer(u, u), sigma);
    const double ratio = std::max(p, kEigFloor) / std::max(q, kEigFloor);
    w0 += outer(u, u) * ratio;
  }
  w0 = clamp_pd(w0, 1e-10);

  Rng master(opts.seed);
  const int restarts = std::max(1, opts.restarts);
  for (int r = 0; r < restarts; ++r) {
    Rng rng = master.child(r);
    Mat w = w0;
    if (r == 0 && init && init->rows() == d && init->cols() == d) {
      w = clamp_pd(init->hermitized(), 1e-12);
    } else if (r == 1) {
      w = Mat::identity(d);
    } else if (r >= 2) {
      Mat h(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) h(i, j) = 0.15 * rng.cgauss();
      const Mat q = unitary_exp_i(h.hermitized());
      w = clamp_pd(q * w0 * q.dagger(), 1e-10);
    }

    // In the eigenbasis of the current witness, the optimal eigenvalues are
    // the likelihood ratios p_k/q_k of the induced Born distributions; that
    // replacement never lowers the scale-invariant value, so it is applied
    // after every gradient step. The ascent then only has to find the basis.
    auto polish = [&](const HermitianEig& eig) {
      Mat wn(d, d);
      for (int k = 0; k < d; ++k) {
        Mat u(d, 1);
        for (int i = 0; i < d; ++i) u(i, 0) = eig.vectors(i, k);
        const Mat pu = outer(u, u);
        const double p = real_trace_prod(pu, rho);
        const double q = real_trace_prod(pu, sigma);
        wn += pu * std::min(std::max(p, 0.0) / std::max(q, 1e-18), 1e15);
      }
      return clamp_pd(wn, 1e-16);
    };

    WitnessEval cur = eval_witness(rho, sigma, w);
    {
      Mat wp = polish(cur.eig);
      WitnessEval pol = eval_witness(rho, sigma, wp);
      if (pol.bits > cur.bits) {
        w = std::move(wp);
        cur = std::move(pol);
      }
    }
    double eta = 0.5;
    int it = 0;
    double last_rel = kInf;
    int stall = 0;
    for (; it < opts.max_iters; ++it) {
      // Keep tr[sigma w] = 1 so the penalized objective agrees with the
      // scale-invariant one and steps act on a well-scaled iterate.
      const double t2 = real_trace_prod(sigma, w);
      if (t2 > 0.0 && std::abs(t2 - 1.0) > 1e-12) {
        w *= cx(1.0 / t2, 0.0);
        cur = eval_witness(rho, sigma, w);
      }
      // Gradient of the concave objective: Dlog_w(rho) - sigma.
      Mat grad = frechet_apply(
          cur.eig, [](double x) { return std::log(std::max(x, kEigFloor)); },
          [](double x) { return 1.0 / std::max(x, kEigFloor); }, rho);
      grad -= sigma;
      const double gnorm = grad.norm_fro();
      if (gnorm < 1e-12) break;

      bool accepted = false;
      for (int bt = 0; bt < 40; ++bt) {
        Mat wn = clamp_pd(w + eta * grad, 1e-14);
        WitnessEval next = eval_witness(rho, sigma, wn);
        Mat wp = polish(next.eig);
        WitnessEval pol = eval_witness(rho, sigma, wp);
        if (pol.bits > next.bits) {
          wn = std::move(wp);
          next = std::move(pol);
        }
        if (next.bits > cur.bits + 1e-16) {
          last_rel = (next.bits - cur.bits) / std::max(1.0, std::abs(next.bits));
          w = std::move(wn);
          cur = std::move(next);
          eta *= 1.4;
          accepted = true;
          break;
        }
        eta *= 0.4;
        if (eta < 1e-14) break;
      }
      if (!accepted) break;
      stall = last_rel < opts.tol ? stall + 1 : 0;
      if (stall >= 4) break;
    }
    if (cur.bits > best.value) {
      best.value = cur.bits;
      best.converged = it < opts.max_iters;
      best.iterations = it;
      best.residual = last_rel == kInf ? 0.0 : last_rel;
      best.maximizer = w;
    }
  }
  return best;
}

VariationalResult measured_renyi(double alpha, const Mat& rho, const Mat& sigma,
                                 const SolverOptions& opts, const Mat* init) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("measured_renyi: alpha must lie in (0, 1)");
  if (!rho.square() || rho.rows() != sigma.rows())
    throw std::invalid_argument("measured_renyi: dimension mismatch");
  const int d = rho.rows();

  // S(U) = sum_i p_i^a q_i^(1-a); the value (1/(a-1)) log S is maximized by
  // minimizing S.
  auto eval_s = [&](const Mat& u, std::vector<double>* pv, std::vector<double>* qv) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
      double p = 0.0, q = 0.0;
      for (int i = 0; i < d; ++i) {
        cx rrow = 0.0, srow = 0.0;
        for (int j = 0; j < d; ++j) {
          rrow += rho(i, j) * u(j, k);
          srow += sigma(i, j) * u(j, k);
        }
        p += (std::conj(u(i, k)) * rrow).real();
        q += (std::conj(u(i, k)) * srow).real();
      }
      p = std::max(p, 0.0);
      q = std::max(q, 0.0);
      if (pv) (*pv)[k] = p;
      if (qv) (*qv)[k] = q;
      if (p > 0.0 && q > 0.0) s += std::pow(p, alpha) * std::pow(q, 1.0 - alpha);
    }
    return s;
  };
  auto bits_of = [&](double s) {
    if (s <= 1e-300) return kInf;
    return std::log(s) / ((alpha - 1.0) * kLn2);
  };

  VariationalResult best;
  best.value = -kInf;
  Rng master(opts.seed);
  const int restarts = std::max(1, opts.restarts);
  std::vector<double> p(d), q(d);

  for (int r = 0; r < restarts; ++r) {
    Rng rng = master.child(1000 + r);
    Mat u = r == 0 ? (init ? *init : relative_log_basis(rho, sigma))
                   : random_unitary(d, rng);
    double s = eval_s(u, &p, &q);
    double eta = 0.2;
    int it = 0;
    double last_rel = 0.0;
    int stall = 0;
    for (; it < opts.max_iters; ++it) {
      // Euclidean gradient column i: a p^(a-1) q^(1-a) rho u_i + (1-a) p^a q^(-a) sigma u_i.
      Mat g(d, d);
      for (int k = 0; k < d; ++k) {
        const double pe = std::max(p[k], 1e-18), qe = std::max(q[k], 1e-18);
        const double wp = alpha * std::pow(pe, alpha - 1.0) * std::pow(qe, 1.0 - alpha);
        const double wq = (1.0 - alpha) * std::pow(pe, alpha) * std::pow(qe, -alpha);
        for (int i = 0; i < d; ++i) {
          cx rrow = 0.0, srow = 0.0;
          for (int j = 0; j < d; ++j) {
            rrow += rho(i, j) * u(j, k);
            srow += sigma(i, j) * u(j, k);
          }
          g(i, k) = wp * rrow + wq * srow;
        }
      }
      // Riemannian steepest descent for S on the unitary group.
      const Mat w = u.dagger() * g;
      Mat skew(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) skew(i, j) = 0.5 * (w(i, j) - std::conj(w(j, i)));
      const double snorm = skew.norm_fro();
      if (snorm < 1e-13) break;

      bool accepted = false;
      for (int bt = 0; bt < 30; ++bt) {
        // exp(-eta skew) = exp(i H) with H = i eta skew (Hermitian).
        Mat h(d, d);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) h(i, j) = cx(0.0, 1.0) * eta * skew(i, j);
        const Mat un = u * unitary_exp_i(h.hermitized());
        const double sn = eval_s(un, &p, &q);
        if (sn < s - 1e-16) {
          last_rel = (s - sn) / std::max(s, 1e-30);
          u = un;
          s = sn;
          eta *= 1.3;
          accepted = true;
          break;
        }
        eta *= 0.4;
        if (eta < 1e-13) break;
      }
      if (!accepted) {
        eval_s(u, &p, &q);
        break;
      }
      stall = last_rel < opts.tol ? stall + 1 : 0;
      if (stall >= 4) break;
    }
    const double bits = bits_of(s);
    if (bits > best.value) {
      best.value = bits;
      best.converged = it < opts.max_iters;
      best.iterations = it;
      best.residual = last_rel;
      best.maximizer = u;
    }
  }
  return best;
}

}  // namespace qcdj
