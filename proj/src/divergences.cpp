#include "qcdj/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "qcdj/linalg.hpp"

namespace qcdj {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.69314718055994530941723212145818;

void check_pair(const Mat& rho, const Mat& sigma, const char* who) {
  if (!rho.square() || !sigma.square() || rho.rows() != sigma.rows())
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  if (!rho.finite() || !sigma.finite())
    throw std::invalid_argument(std::string(who) + ": non-finite entries");
}

// rho-mass outside the support of sigma, given sigma's eigensystem.
double support_leak(const Mat& rho, const HermitianEig& es) {
  const int d = rho.rows();
  const double th = support_threshold(std::max(es.values.front(), 0.0));
  double leak = 0.0;
  for (int k = 0; k < d; ++k) {
    if (es.values[k] > th) continue;
    cx q = 0.0;
    for (int i = 0; i < d; ++i) {
      cx row = 0.0;
      for (int j = 0; j < d; ++j) row += rho(i, j) * es.vectors(j, k);
      q += std::conj(es.vectors(i, k)) * row;
    }
    leak += q.real();
  }
  return leak;
}

double quadratic_form(const Mat& x, const Mat& vectors, int k) {
  const int d = x.rows();
  cx q = 0.0;
  for (int i = 0; i < d; ++i) {
    cx row = 0.0;
    for (int j = 0; j < d; ++j) row += x(i, j) * vectors(j, k);
    q += std::conj(vectors(i, k)) * row;
  }
  return q.real();
}

}  // namespace

double binary_entropy(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("binary_entropy: argument outside [0, 1]");
  double h = 0.0;
  if (eps > 0.0) h -= eps * std::log2(eps);
  if (eps < 1.0) h -= (1.0 - eps) * std::log2(1.0 - eps);
  return h;
}

bool support_within(const Mat& rho, const Mat& sigma) {
  check_pair(rho, sigma, "support_within");
  const auto es = hermitian_eig(sigma);
  return support_leak(rho, es) <= 1e-9 * std::max(1.0, std::abs(rho.trace().real()));
}

double umegaki(const Mat& rho, const Mat& sigma) {
  check_pair(rho, sigma, "umegaki");
  const auto er = hermitian_eig(rho);
  const auto es = hermitian_eig(sigma);
  if (support_leak(rho, es) > 1e-9 * std::max(1.0, std::abs(rho.trace().real()))) return kInf;

  const double thr = support_threshold(std::max(er.values.front(), 0.0));
  double term1 = 0.0;  // tr[rho ln rho]
  for (double v : er.values)
    if (v > thr) term1 += v * std::log(v);

  const double ths = support_threshold(std::max(es.values.front(), 0.0));
  double term2 = 0.0;  // tr[rho ln sigma] on the support of sigma
  for (int k = 0; k < sigma.rows(); ++k)
    if (es.values[k] > ths) term2 += std::log(es.values[k]) * quadratic_form(rho, es.vectors, k);

  return (term1 - term2) / kLn2;
}

double petz_renyi(double alpha, const Mat& rho, const Mat& sigma) {
  check_pair(rho, sigma, "petz_renyi");
  if (!(alpha > 0.0) || alpha == 1.0)
    throw std::invalid_argument("petz_renyi: alpha must lie in (0,1) or (1,inf)");
  if (alpha > 1.0 && !support_within(rho, sigma)) return kInf;
  const Mat ra = matrix_pow_support(rho, alpha);
  const Mat sb = matrix_pow_support(sigma, 1.0 - alpha);
  const double q = real_trace_prod(ra, sb);
  if (q <= 0.0) return kInf;
  return std::log(q) / ((alpha - 1.0) * kLn2);
}

double sandwiched_renyi(double alpha, const Mat& rho, const Mat& sigma) {
  check_pair(rho, sigma, "sandwiched_renyi");
  if (!(alpha > 0.0) || alpha == 1.0)
    throw std::invalid_argument("sandwiched_renyi: alpha must lie in (0,1) or (1,inf)");
  if (alpha > 1.0 && !support_within(rho, sigma)) return kInf;
  const Mat sc = matrix_pow_support(sigma, (1.0 - alpha) / (2.0 * alpha));
  const Mat t = (sc * rho * sc).hermitized();
  const Mat ta = matrix_pow_support(t, alpha);
  double q = 0.0;
  for (int i = 0; i < ta.rows(); ++i) q += ta(i, i).real();
  if (q <= 0.0) return kInf;
  return std::log(q) / ((alpha - 1.0) * kLn2);
}

TestingResult hypothesis_testing(double eps, const Mat& rho, const Mat& sigma) {
  check_pair(rho, sigma, "hypothesis_testing");
  if (!(eps >= 0.0 && eps <= 1.0))
    throw std::invalid_argument("hypothesis_testing: eps outside [0, 1]");
  const int d = rho.rows();

  TestingResult out;
  out.optimal_effect = Mat::zeros(d, d);
  if (eps >= 1.0) {
    out.beta = 0.0;
    out.divergence = kInf;
    out.threshold = kInf;
    out.gamma = 0.0;
    return out;
  }
  const double tau = 1.0 - eps;

  const auto es = hermitian_eig(sigma);
  const double smax = std::max(es.values.front(), 0.0);
  const double ths = support_threshold(smax);

  // If enough rho-mass lives on ker(sigma), a test supported there reaches
  // beta = 0 exactly.
  {
    Mat pker(d, d);
    for (int k = 0; k < d; ++k) {
      if (es.values[k] > ths) continue;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          pker(i, j) += es.vectors(i, k) * std::conj(es.vectors(j, k));
    }
    const double kmass = real_trace_prod(rho, pker);
    if (kmass >= tau - 1e-13) {
      out.gamma = kmass > 0.0 ? std::min(1.0, tau / kmass) : 0.0;
      out.optimal_effect = pker * out.gamma;
      out.beta = 0.0;
      out.divergence = kInf;
      out.threshold = kInf;
      return out;
    }
  }

  // Commuting pair: the problem is a fractional knapsack over the shared
  // eigenbasis, ordered by likelihood ratio. This is exact and skips the
  // threshold search below.
  {
    const Mat r_in_s = es.vectors.dagger() * rho * es.vectors;
    double offdiag = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (i != j) offdiag += std::norm(r_in_s(i, j));
    if (std::sqrt(offdiag) <= 1e-13) {
      std::vector<int> order(d);
      for (int k = 0; k < d; ++k) order[k] = k;
      auto ratio = [&](int k) {
        const double p = std::max(r_in_s(k, k).real(), 0.0);
        const double q = std::max(es.values[k], 0.0);
        if (q <= 0.0) return p > 0.0 ? kInf : 0.0;
        return p / q;
      };
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return ratio(a) > ratio(b); });
      Mat m(d, d);
      double acc = 0.0, beta = 0.0, gamma = 1.0, thr = 0.0;
      for (int k : order) {
        if (acc >= tau - 1e-15) break;
        const double p = std::max(r_in_s(k, k).real(), 0.0);
        if (p <= 0.0) continue;
        const double w = std::min(1.0, (tau - acc) / p);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            m(i, j) += w * es.vectors(i, k) * std::conj(es.vectors(j, k));
        acc += w * p;
        beta += w * std::max(es.values[k], 0.0);
        gamma = w;
        thr = ratio(k);
      }
      out.optimal_effect = m.hermitized();
      out.beta = std::max(0.0, beta);
      out.divergence = out.beta > 0.0 ? -std::log2(out.beta) : kInf;
      out.threshold = thr;
      out.gamma = gamma;
      return out;
    }
  }

  // Accepted rho-mass of the strict positive part of rho - t sigma. This is
  // non-increasing in t, equals 1 at t = 0 and tends to the kernel mass.
  auto pos_mass = [&](double t) {
    const Mat a = rho - t * sigma;
    const auto ea = hermitian_eig(a);
    const double band = 1e-13 * std::max(1.0, std::abs(ea.values.front()));
    double mass = 0.0;
    for (int k = 0; k < d; ++k)
      if (ea.values[k] > band) mass += quadratic_form(rho, ea.vectors, k);
    return mass;
  };

  double tstar = 0.0;
  if (tau < 1.0) {
    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (pos_mass(hi) > tau && guard++ < 64) {
      lo = hi;
      hi *= 4.0;
      if (hi > 1e18) break;
    }
    while (hi - lo > 1e-14 * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      if (pos_mass(mid) > tau)
        lo = mid;
      else
        hi = mid;
    }
    tstar = hi;
  }

  // Fill the test greedily in the eigenbasis of rho - t* sigma, taking
  // eigenvectors in decreasing eigenvalue order (equivalently decreasing
  // likelihood ratio around the threshold) until the acceptance constraint
  // is met, with a fractional weight on the crossing eigenvector. Ties at
  // the threshold contribute beta in proportion to the rho-mass they absorb,
  // so their ordering does not affect the optimum.
  const Mat a = rho - tstar * sigma;
  const auto ea = hermitian_eig(a);
  Mat m(d, d);
  double acc = 0.0;
  double gamma = 1.0;
  for (int k = 0; k < d && acc < tau - 1e-15; ++k) {
    const double ak = quadratic_form(rho, ea.vectors, k);
    if (ak <= 0.0) continue;
    const double w = std::min(1.0, (tau - acc) / ak);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        m(i, j) += w * ea.vectors(i, k) * std::conj(ea.vectors(j, k));
    acc += w * ak;
    gamma = w;
  }
  out.optimal_effect = m.hermitized();
  out.beta = std::max(0.0, real_trace_prod(sigma, out.optimal_effect));
  out.divergence = out.beta > 0.0 ? -std::log2(out.beta) : kInf;
  out.threshold = tstar;
  out.gamma = gamma;
  return out;
}

double evaluate_divergence(const DivergenceSpec& spec, const Mat& rho, const Mat& sigma) {
  switch (spec.kind) {
    case DivKind::Umegaki:
      return umegaki(rho, sigma);
    case DivKind::PetzRenyi:
      return petz_renyi(spec.alpha, rho, sigma);
    case DivKind::SandwichedRenyi:
      return sandwiched_renyi(spec.alpha, rho, sigma);
    case DivKind::HypothesisTesting:
      return hypothesis_testing(spec.epsilon, rho, sigma).divergence;
    case DivKind::Measured:
      return measured_relative_entropy(rho, sigma, spec.solver).value;
    case DivKind::MeasuredRenyi:
      return measured_renyi(spec.alpha, rho, sigma, spec.solver).value;
  }
  throw std::logic_error("evaluate_divergence: unknown kind");
}

}  // namespace qcdj
