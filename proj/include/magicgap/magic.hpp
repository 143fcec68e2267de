#pragma once

#include <cmath>

#include "wh.hpp"

namespace magicgap {

// chi_a = Tr(D_a^dagger O) / D over all d^{2n} reduced indices, flat-indexed
// big-endian in the interleaved component order.
struct CharFunction {
  HilbertSpec spec;
  std::vector<cx> values;

  long long index_count() const {
    long long c = 1;
    for (int i = 0; i < 2 * spec.n; ++i) c *= spec.d;
    return c;
  }
};

struct PureState {
  Vec amplitudes;

  explicit PureState(Vec a) : amplitudes(std::move(a)) {
    if (std::abs(amplitudes.norm() - 1.0) > 1e-10)
      throw std::invalid_argument("PureState: not normalized");
  }
};

inline CharFunction char_function(const HilbertSpec& spec, const Mat& O) {
  const long long D = spec.dim();
  if (O.rows() != D || O.cols() != D)
    throw std::invalid_argument("char_function: operator shape mismatch");
  CharFunction cf{spec, {}};
  const long long idx = cf.index_count();
  cf.values.resize(idx);
  for (long long f = 0; f < idx; ++f) {
    auto a = unflatten_index(f, spec.d, spec.n);
    cf.values[f] = displacement(spec, a).trace_dag_times(O) / double(D);
  }
  return cf;
}

// Sole access path for shifted indices: applies the even-d periodicity sign.
inline cx eval_char_at(const CharFunction& cf, const RawIndex& raw) {
  auto [sign, x] = canonicalize_index(raw, cf.spec.d);
  return double(sign) * cf.values[flatten_index(x, cf.spec.d)];
}

namespace detail {

// |<psi|D_a|psi>| for every reduced a, grouped by x-part via mixed-radix DFTs
// over the z-part; tau prefactors drop out of the magnitudes. Output is in
// canonical interleaved flat order (matching CharFunction).
inline std::vector<double> wh_overlaps(const HilbertSpec& spec, const Vec& psi) {
  const int d = spec.d, n = spec.n;
  const long long D = spec.dim();
  std::vector<double> out((std::size_t)(D * D));
  // interleaved flat contributions of the x digits (slots 2i) and z digits
  // (slots 2i+1), both enumerated big-endian
  std::vector<long long> xmap(D), zmap(D);
  for (long long f = 0; f < D; ++f) {
    auto dig = digits_big_endian(f, d, n);
    long long xc = 0, zc = 0;
    for (int i = 0; i < n; ++i) {
      long long px = 1, pz = 1;
      for (int t = 0; t < 2 * n - 1 - 2 * i; ++t) px *= d;
      for (int t = 0; t < 2 * n - 2 - 2 * i; ++t) pz *= d;
      xc += dig[i] * px;
      zc += dig[i] * pz;
    }
    xmap[f] = xc;
    zmap[f] = zc;
  }
  std::vector<cx> W((std::size_t)d * d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) W[(std::size_t)j * d + k] = omega_pow(d, (long long)j * k);
  std::vector<long long> strides(n);
  {
    long long s = 1;
    for (int i = n - 1; i >= 0; --i) {
      strides[i] = s;
      s *= d;
    }
  }
  std::vector<cx> g(D), scratch(d);
  for (long long xf = 0; xf < D; ++xf) {
    auto xd = digits_big_endian(xf, d, n);
    // shifted-index permutation: k -> k + x (componentwise mod d)
    std::vector<int> kd(n, 0);
    for (long long k = 0; k < D; ++k) {
      long long img = 0;
      for (int i = 0; i < n; ++i) img += strides[i] * ((kd[i] + xd[i]) % d);
      g[k] = std::conj(psi(img)) * psi(k);
      for (int i = n - 1; i >= 0; --i) {
        if (++kd[i] < d) break;
        kd[i] = 0;
      }
    }
    // DFT along each axis: G[z] = sum_k omega^{z.k} g[k]
    for (int axis = 0; axis < n; ++axis) {
      const long long s = strides[axis];
      for (long long base = 0; base < D; ++base) {
        if ((base / s) % d != 0) continue;
        for (int z = 0; z < d; ++z) {
          cx acc = 0;
          for (int k = 0; k < d; ++k) acc += W[(std::size_t)z * d + k] * g[base + k * s];
          scratch[z] = acc;
        }
        for (int z = 0; z < d; ++z) g[base + z * s] = scratch[z];
      }
    }
    for (long long z = 0; z < D; ++z) out[xmap[xf] + zmap[z]] = std::abs(g[z]);
  }
  return out;
}

}  // namespace detail

// P_a = |Tr(D_a^dag psi psi^dag)|^2 / D, a probability vector over all
// reduced indices in canonical flat order.
inline std::vector<double> wh_distribution(const HilbertSpec& spec, const PureState& psi) {
  const long long D = spec.dim();
  if (psi.amplitudes.size() != D)
    throw std::invalid_argument("wh_distribution: state dimension mismatch");
  auto tr = detail::wh_overlaps(spec, psi.amplitudes);
  std::vector<double> P(tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) P[i] = tr[i] * tr[i] / double(D);
  return P;
}

namespace detail {

inline double clamp_entropy(double v) {
  if (v >= 0) return v;
  if (v >= -1e-10) return 0.0;
  throw std::runtime_error("stabilizer entropy came out negative: broken WH basis?");
}

}  // namespace detail

inline double linear_se(const HilbertSpec& spec, const PureState& psi) {
  const long long D = spec.dim();
  if (psi.amplitudes.size() != D)
    throw std::invalid_argument("linear_se: state dimension mismatch");
  auto tr = detail::wh_overlaps(spec, psi.amplitudes);
  double s = 0;
  for (double t : tr) {
    double t2 = t * t;
    s += t2 * t2;
  }
  return detail::clamp_entropy(1.0 - s / double(D));
}

inline double renyi_se(const HilbertSpec& spec, const PureState& psi, double alpha) {
  if (alpha <= 0 || alpha == 1.0)
    throw std::domain_error("renyi_se: alpha must be positive and != 1");
  auto P = wh_distribution(spec, psi);
  double s = 0;
  for (double p : P)
    if (p > 0) s += std::pow(p, alpha);
  double val = std::log(s) / (1.0 - alpha) - std::log(double(spec.dim()));
  return detail::clamp_entropy(val);
}

inline double st_norm(const HilbertSpec& spec, const PureState& psi) {
  auto tr = detail::wh_overlaps(spec, psi.amplitudes);
  double s = 0;
  for (double t : tr) s += t;
  return s / double(spec.dim());
}

inline double robustness_lower_bound(double M) {
  if (M < 0 || M >= 1) throw std::domain_error("robustness_lower_bound: need 0 <= M < 1");
  return std::sqrt(1.0 / (1.0 - M));
}

inline double se_upper_bound(const HilbertSpec& spec, double alpha) {
  if (alpha <= 0 || alpha == 1.0)
    throw std::domain_error("se_upper_bound: alpha must be positive and != 1");
  double D = double(spec.dim());
  return std::log((1.0 + (D - 1.0) * std::pow(D + 1.0, 1.0 - alpha)) / D) / (1.0 - alpha);
}

}  // namespace magicgap
