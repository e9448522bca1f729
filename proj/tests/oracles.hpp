#pragma once

// Reference implementations used only by tests. These deliberately avoid the
// library code paths they are checking: the partial trace sums explicit
// multi-indices, the Neyman-Pearson oracle is the classical fractional
// knapsack, and the grid searches enumerate candidates instead of ascending.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "qcdj/matrix.hpp"
#include "qcdj/rng.hpp"

namespace oracle {

// Partial trace by looping over every output entry and every traced index,
// with index arithmetic done longhand.
inline qcdj::Mat partial_trace_direct(const qcdj::Mat& x, const std::vector<int>& dims,
                                      const std::vector<int>& keep) {
  const int m = static_cast<int>(dims.size());
  std::vector<bool> kept(m, false);
  for (int k : keep) kept[k] = true;

  int dk = 1, dt = 1;
  for (int i = 0; i < m; ++i) (kept[i] ? dk : dt) *= dims[i];

  auto flat = [&](const std::vector<int>& mi) {
    int f = 0;
    for (int i = 0; i < m; ++i) f = f * dims[i] + mi[i];
    return f;
  };
  auto unpack = [&](int v, bool into_kept) {
    std::vector<int> part;
    for (int i = m - 1; i >= 0; --i) {
      if (kept[i] == into_kept) {
        part.insert(part.begin(), v % dims[i]);
        v /= dims[i];
      }
    }
    return part;
  };
  auto assemble = [&](const std::vector<int>& kpart, const std::vector<int>& tpart) {
    std::vector<int> mi(m);
    int a = 0, b = 0;
    for (int i = 0; i < m; ++i) mi[i] = kept[i] ? kpart[a++] : tpart[b++];
    return mi;
  };

  qcdj::Mat r(dk, dk);
  for (int i = 0; i < dk; ++i)
    for (int j = 0; j < dk; ++j) {
      const std::vector<int> ki = unpack(i, true);
      const std::vector<int> kj = unpack(j, true);
      qcdj::cx s = 0.0;
      for (int t = 0; t < dt; ++t) {
        const std::vector<int> tt = unpack(t, false);
        s += x(flat(assemble(ki, tt)), flat(assemble(kj, tt)));
      }
      r(i, j) = s;
    }
  return r;
}

struct ClassicalNp {
  double beta = 0.0;
  std::vector<double> test;  // per-outcome acceptance weight in [0,1]
};

// Exact classical Neyman-Pearson optimum for diagonal pairs: minimize sum
// q_i m_i subject to sum p_i m_i >= 1 - eps, 0 <= m <= 1. Fractional
// knapsack on the likelihood ratio.
inline ClassicalNp np_greedy(const std::vector<double>& p, const std::vector<double>& q,
                             double eps) {
  const int n = static_cast<int>(p.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto ratio = [&](int i) {
    if (q[i] <= 0.0) return p[i] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return p[i] / q[i];
  };
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return ratio(a) > ratio(b); });

  ClassicalNp out;
  out.test.assign(n, 0.0);
  double need = 1.0 - eps;
  for (int i : idx) {
    if (need <= 0.0) break;
    if (p[i] <= 0.0) continue;
    const double take = std::min(1.0, need / p[i]);
    out.test[i] = take;
    out.beta += take * q[i];
    need -= take * p[i];
  }
  return out;
}

// Classical divergences on distributions, in bits.
inline double kl_bits(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    s += p[i] * std::log2(p[i] / q[i]);
  }
  return s;
}

inline double renyi_bits(double alpha, const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0 && alpha > 1.0) return std::numeric_limits<double>::infinity();
    if (q[i] <= 0.0) continue;
    s += std::pow(p[i], alpha) * std::pow(q[i], 1.0 - alpha);
  }
  if (s <= 0.0) return std::numeric_limits<double>::infinity();
  return std::log2(s) / (alpha - 1.0);
}

// Random probability vector (flat Dirichlet via exponentials).
inline std::vector<double> random_simplex(int n, qcdj::Rng& rng) {
  std::vector<double> v(n);
  double s = 0.0;
  for (auto& x : v) {
    x = -std::log(std::max(rng.uniform(), 1e-300));
    s += x;
  }
  for (auto& x : v) x /= s;
  return v;
}

}  // namespace oracle
