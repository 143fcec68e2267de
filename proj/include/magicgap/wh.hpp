#pragma once

#include <algorithm>
#include <random>
#include <utility>

#include "core.hpp"

namespace magicgap {

// Interleaved layout (x_1, z_1, ..., x_n, z_n), every component in [0, d).
using SymplecticIndex = std::vector<int>;

// Unreduced integer vector, same layout; components may be >= d or negative.
using RawIndex = std::vector<long long>;

namespace detail {

inline void check_pair_lengths(std::size_t la, std::size_t lb) {
  if (la != lb || la % 2 != 0)
    throw std::invalid_argument("symplectic indices: length mismatch");
}

template <class A, class B>
long long symplectic_raw(const A& a, const B& b) {
  check_pair_lengths(a.size(), b.size());
  long long s = 0;
  for (std::size_t i = 0; i + 1 < a.size(); i += 2)
    s += (long long)a[i + 1] * b[i] - (long long)a[i] * b[i + 1];
  return s;
}

// tau^e for integer e, tau = -exp(i pi / d); exact 2d periodicity.
inline cx tau_pow(int d, long long e) {
  long long m = e % (2LL * d);
  if (m < 0) m += 2LL * d;
  cx t = std::polar(1.0, kPi * double(m) / double(d));
  return (m % 2 == 0) ? t : -t;
}

inline cx omega_pow(int d, long long e) {
  long long m = e % d;
  if (m < 0) m += d;
  return std::polar(1.0, 2.0 * kPi * double(m) / double(d));
}

inline std::vector<int> digits_big_endian(long long k, int d, int n) {
  std::vector<int> ks(n);
  for (int i = n - 1; i >= 0; --i) {
    ks[i] = int(k % d);
    k /= d;
  }
  return ks;
}

}  // namespace detail

// [a,b] = sum_i (a_{z,i} b_{x,i} - a_{x,i} b_{z,i}), reduced mod 2d.
inline int symplectic_form(const SymplecticIndex& a, const SymplecticIndex& b, int d) {
  long long s = detail::symplectic_raw(a, b) % (2LL * d);
  if (s < 0) s += 2LL * d;
  return int(s);
}

// Reduce a raw index mod d. For even d, D_{x+dy} = (-1)^{[x,y]} D_x with
// y = (a-x)/d; the sign must come from the raw vector as a whole.
inline std::pair<int, SymplecticIndex> canonicalize_index(const RawIndex& a, int d) {
  SymplecticIndex x(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    long long m = a[i] % d;
    if (m < 0) m += d;
    x[i] = int(m);
  }
  if (d % 2 == 1) return {1, x};
  RawIndex y(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = (a[i] - x[i]) / d;
  long long form = detail::symplectic_raw(x, y);
  int sign = (((form % 2) + 2) % 2 == 0) ? 1 : -1;
  return {sign, x};
}

// Displacement operator as a generalized permutation:
// D_a |k> = tau^{sum x_i z_i} omega^{sum z_i k_i} |k + a_x mod d>.
struct GeneralizedPermOp {
  long long D = 0;
  std::vector<long long> perm;  // k -> image index
  std::vector<cx> phase;        // phase attached to the image

  Mat dense() const {
    Mat M = Mat::Zero(D, D);
    for (long long k = 0; k < D; ++k) M(perm[k], k) = phase[k];
    return M;
  }

  Vec apply(const Vec& v) const {
    Vec out(D);
    for (long long k = 0; k < D; ++k) out(perm[k]) = phase[k] * v(k);
    return out;
  }

  // <v| Op |v> without materializing the matrix.
  cx expectation(const Vec& v) const {
    cx s = 0;
    for (long long k = 0; k < D; ++k) s += std::conj(v(perm[k])) * phase[k] * v(k);
    return s;
  }

  // Tr(Op^dagger O) for dense O.
  cx trace_dag_times(const Mat& O) const {
    cx s = 0;
    for (long long k = 0; k < D; ++k) s += std::conj(phase[k]) * O(perm[k], k);
    return s;
  }
};

inline GeneralizedPermOp displacement(const HilbertSpec& spec, const SymplecticIndex& a) {
  if ((int)a.size() != 2 * spec.n)
    throw std::invalid_argument("displacement: index length != 2n");
  for (int v : a)
    if (v < 0 || v >= spec.d)
      throw std::invalid_argument("displacement: component out of [0,d)");
  const int d = spec.d, n = spec.n;
  const long long D = spec.dim();
  GeneralizedPermOp op;
  op.D = D;
  op.perm.resize(D);
  op.phase.resize(D);
  long long xz = 0;
  for (int i = 0; i < n; ++i) xz += (long long)a[2 * i] * a[2 * i + 1];
  // tau^{xz} omega^{z.k} = tau^{xz + 2 z.k}
  std::vector<long long> strides(n);
  {
    long long s = 1;
    for (int i = n - 1; i >= 0; --i) {
      strides[i] = s;
      s *= d;
    }
  }
  std::vector<int> ks(n, 0);
  for (long long k = 0; k < D; ++k) {
    long long zk = 0, img = 0;
    for (int i = 0; i < n; ++i) {
      zk += (long long)a[2 * i + 1] * ks[i];
      img += strides[i] * ((ks[i] + a[2 * i]) % d);
    }
    op.perm[k] = img;
    op.phase[k] = detail::tau_pow(d, xz + 2 * zk);
    for (int i = n - 1; i >= 0; --i) {
      if (++ks[i] < d) break;
      ks[i] = 0;
    }
  }
  return op;
}

// D_a D_b = tau^{exponent} D_{(a+b) mod d}, with the even-d reduction sign
// folded into the exponent (tau^d = -1 for even d).
inline std::pair<int, SymplecticIndex> mul_indices(const SymplecticIndex& a,
                                                   const SymplecticIndex& b, int d) {
  detail::check_pair_lengths(a.size(), b.size());
  RawIndex raw(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) raw[i] = (long long)a[i] + b[i];
  auto [sign, x] = canonicalize_index(raw, d);
  long long e = detail::symplectic_raw(a, b);
  if (sign < 0) e += d;
  long long m = e % (2LL * d);
  if (m < 0) m += 2LL * d;
  return {int(m), x};
}

// ---- Clifford generators (dense, for tests) ----

inline Mat fourier_gate(int d) {
  Mat F(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      F(j, k) = detail::omega_pow(d, (long long)j * k) / std::sqrt(double(d));
  return F;
}

inline Mat phase_gate(int d) {
  Mat P = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) P(k, k) = detail::tau_pow(d, (long long)k * k);
  return P;
}

inline Mat site_gate(const HilbertSpec& spec, int site, const Mat& g) {
  Mat out = Mat::Ones(1, 1);
  for (int i = 0; i < spec.n; ++i) {
    const Mat& f = (i == site) ? g : Mat(Mat::Identity(spec.d, spec.d));
    Mat next(out.rows() * f.rows(), out.cols() * f.cols());
    for (int r = 0; r < out.rows(); ++r)
      for (int c = 0; c < out.cols(); ++c)
        next.block(r * f.rows(), c * f.cols(), f.rows(), f.cols()) = out(r, c) * f;
    out = next;
  }
  return out;
}

inline Mat cz_gate(const HilbertSpec& spec, int i, int j) {
  const long long D = spec.dim();
  Mat M = Mat::Zero(D, D);
  for (long long k = 0; k < D; ++k) {
    auto ks = detail::digits_big_endian(k, spec.d, spec.n);
    M(k, k) = detail::omega_pow(spec.d, (long long)ks[i] * ks[j]);
  }
  return M;
}

inline Mat qudit_permutation_gate(const HilbertSpec& spec, const std::vector<int>& pi) {
  const long long D = spec.dim();
  Mat M = Mat::Zero(D, D);
  for (long long k = 0; k < D; ++k) {
    auto ks = detail::digits_big_endian(k, spec.d, spec.n);
    long long img = 0;
    for (int i = 0; i < spec.n; ++i) img = img * spec.d + ks[pi[i]];
    M(img, k) = 1.0;
  }
  return M;
}

// Flat enumeration of all d^{2n} reduced indices, big-endian component order.
inline long long flatten_index(const SymplecticIndex& a, int d) {
  long long f = 0;
  for (int v : a) f = f * d + v;
  return f;
}

inline SymplecticIndex unflatten_index(long long f, int d, int n) {
  SymplecticIndex a(2 * n);
  for (int i = 2 * n - 1; i >= 0; --i) {
    a[i] = int(f % d);
    f /= d;
  }
  return a;
}

// Is V a unit phase times some displacement? Returns the matching index, or
// empty. Tolerance: |Tr(D_b^dag V)| >= D - 1e-8 for exactly one b.
inline std::pair<bool, SymplecticIndex> match_displacement(const HilbertSpec& spec,
                                                           const Mat& V) {
  const long long D = spec.dim();
  long long idx_count = 1;
  for (int i = 0; i < 2 * spec.n; ++i) idx_count *= spec.d;
  SymplecticIndex found;
  int hits = 0;
  for (long long f = 0; f < idx_count; ++f) {
    auto a = unflatten_index(f, spec.d, spec.n);
    cx t = displacement(spec, a).trace_dag_times(V);
    if (std::abs(t) >= double(D) - 1e-8) {
      ++hits;
      found = a;
    }
  }
  return {hits == 1, found};
}

template <class Rng>
Mat random_clifford(const HilbertSpec& spec, Rng& rng) {
  const long long D = spec.dim();
  std::uniform_int_distribution<int> len_dist(20, 32);
  std::uniform_int_distribution<int> site_dist(0, spec.n - 1);
  const int word_len = len_dist(rng);
  Mat U = Mat::Identity(D, D);
  Mat F = fourier_gate(spec.d), P = phase_gate(spec.d);
  for (int w = 0; w < word_len; ++w) {
    int kinds = (spec.n >= 2) ? 4 : 2;
    int kind = std::uniform_int_distribution<int>(0, kinds - 1)(rng);
    Mat g;
    if (kind == 0) {
      g = site_gate(spec, site_dist(rng), F);
    } else if (kind == 1) {
      g = site_gate(spec, site_dist(rng), P);
    } else if (kind == 2) {
      int i = site_dist(rng), j = site_dist(rng);
      while (j == i) j = site_dist(rng);
      g = cz_gate(spec, i, j);
    } else {
      std::vector<int> pi(spec.n);
      for (int i = 0; i < spec.n; ++i) pi[i] = i;
      std::shuffle(pi.begin(), pi.end(), rng);
      g = qudit_permutation_gate(spec, pi);
    }
    U = g * U;
  }
  // Normalizer sanity: U must map each elementary displacement to a phase
  // times a displacement.
  for (int m = 0; m < 2 * spec.n; ++m) {
    SymplecticIndex e(2 * spec.n, 0);
    e[m] = 1;
    Mat V = U * displacement(spec, e).dense() * U.adjoint();
    if (!match_displacement(spec, V).first)
      throw std::runtime_error("random_clifford: generator failed normalizer check");
  }
  return U;
}

}  // namespace magicgap
