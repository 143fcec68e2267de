#pragma once

#include <iostream>

#include "averages.hpp"

namespace magicgap {

// amplitudes over |j, m> with m = j, j-1, ..., -j
struct SpinState {
  int two_j = 0;
  Vec amplitudes;

  SpinState(int two_j_, Vec amps) : two_j(two_j_), amplitudes(std::move(amps)) {
    if (two_j < 0) throw std::invalid_argument("SpinState: 2j must be >= 0");
    if (amplitudes.size() != two_j + 1)
      throw std::invalid_argument("SpinState: need 2j+1 amplitudes");
    if (std::abs(amplitudes.norm() - 1.0) > 1e-10)
      throw std::invalid_argument("SpinState: not normalized");
  }
};

struct StarConstellation {
  std::vector<cx> finite;
  int inf_count = 0;

  int size() const { return int(finite.size()) + inf_count; }
};

// |j, m> -> even superposition of all 2j-qubit strings with j+m qubits up
// (up = |0>).
inline Embedding symmetric_qubit_embedding(int two_j) {
  if (two_j < 1) throw std::invalid_argument("symmetric_qubit_embedding: need 2j >= 1");
  HilbertSpec big(2, two_j);
  const long long D = big.dim();
  Mat cols = Mat::Zero(D, two_j + 1);
  for (long long k = 0; k < D; ++k) {
    int ones = 0;
    for (long long b = k; b; b >>= 1) ones += int(b & 1);
    int ups = two_j - ones;          // |0> bits count
    int col = two_j - ups;           // column order m = j ... -j
    cols(k, col) = 1.0 / std::sqrt(double(binom(two_j, ups)));
  }
  return Embedding(big, cols);
}

// Roots of p(z) = sum_m (-1)^{j-m} sqrt(binom(2j, j-m)) <j,m|psi> z^{j+m};
// missing degrees contribute roots at infinity.
inline StarConstellation majorana_roots(const SpinState& psi) {
  const int deg = psi.two_j;
  std::vector<cx> coeff(deg + 1);  // ascending powers
  double cmax = 0;
  for (int p = 0; p <= deg; ++p) {
    int jm = deg - p;  // j - m
    double sgn = (jm % 2 == 0) ? 1.0 : -1.0;
    coeff[p] = sgn * std::sqrt(double(binom(deg, jm))) * psi.amplitudes(jm);
    cmax = std::max(cmax, std::abs(coeff[p]));
  }
  StarConstellation stars;
  int hi = deg;
  while (hi > 0 && std::abs(coeff[hi]) < 1e-13 * cmax) {
    --hi;
    ++stars.inf_count;
  }
  int lo = 0;
  while (lo < hi && std::abs(coeff[lo]) < 1e-13 * cmax) {
    ++lo;
    stars.finite.push_back(0.0);
  }
  int m = hi - lo;  // effective degree
  if (m > 0) {
    Mat companion = Mat::Zero(m, m);
    for (int i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < m; ++i) companion(i, m - 1) = -coeff[lo + i] / coeff[hi];
    Eigen::ComplexEigenSolver<Mat> es(companion);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("majorana_roots: eigensolver failed");
    for (int i = 0; i < m; ++i) {
      cx r = es.eigenvalues()(i);
      cx val = 0, zp = 1;
      double scale = std::max(1.0, std::pow(std::abs(r), m));
      for (int p = lo; p <= hi; ++p) {
        val += coeff[p] * zp;
        zp *= r;
      }
      if (std::abs(val) / (cmax * scale) > 1e-8)
        throw std::runtime_error("majorana_roots: residual too large");
      stars.finite.push_back(r);
    }
  }
  return stars;
}

inline Eigen::Vector3d root_to_bloch(const cx& alpha, bool at_infinity = false) {
  if (at_infinity) return {0.0, 0.0, -1.0};
  double a2 = std::norm(alpha);
  return Eigen::Vector3d(2.0 * alpha.real(), 2.0 * alpha.imag(), 1.0 - a2) / (1.0 + a2);
}

// alpha -> (1, alpha)/sqrt(1+|alpha|^2); infinity -> (0, 1)
inline std::vector<Vec> roots_to_product_state(const StarConstellation& stars) {
  std::vector<Vec> out;
  for (const cx& a : stars.finite) {
    Vec q(2);
    q << 1.0, a;
    out.push_back(q / q.norm());
  }
  for (int i = 0; i < stars.inf_count; ++i) {
    Vec q(2);
    q << 0.0, 1.0;
    out.push_back(q);
  }
  return out;
}

inline Vec tensor_product(const std::vector<Vec>& factors) {
  Vec out = Vec::Ones(1);
  for (const Vec& f : factors) {
    Vec next(out.size() * f.size());
    for (long long i = 0; i < out.size(); ++i)
      for (long long j = 0; j < f.size(); ++j) next(i * f.size() + j) = out(i) * f(j);
    out = next;
  }
  return out;
}

namespace detail {

inline void spin_operators(int two_j, Mat& jx, Mat& jy, Mat& jz) {
  const int dim = two_j + 1;
  const double j = two_j / 2.0;
  Mat jp = Mat::Zero(dim, dim);
  jz = Mat::Zero(dim, dim);
  // basis order m = j ... -j
  for (int i = 0; i < dim; ++i) {
    double m = j - i;
    jz(i, i) = m;
    if (i > 0) jp(i - 1, i) = std::sqrt(j * (j + 1) - (m) * (m + 1));
  }
  jx = (jp + jp.adjoint()) / 2.0;
  jy = (jp - jp.adjoint()) / cx(0, 2.0);
}

}  // namespace detail

// Projector onto the total-spin-0 sector of n identical spins (uniform local
// dimension so the host WH group is defined).
inline SubspaceProjector spin_zero_projector(const std::vector<int>& two_js) {
  if (two_js.empty()) throw std::invalid_argument("spin_zero_projector: empty spin list");
  for (int tj : two_js)
    if (tj != two_js[0])
      throw std::domain_error(
          "spin_zero_projector: mixed local spins have no uniform-qudit WH group");
  const int tj = two_js[0];
  const int n = int(two_js.size());
  HilbertSpec spec(tj + 1, n);
  const long long D = spec.dim();
  if (D > 4096) throw std::invalid_argument("spin_zero_projector: total dimension > 4096");
  Mat jx, jy, jz;
  detail::spin_operators(tj, jx, jy, jz);
  Mat J2 = Mat::Zero(D, D);
  for (const Mat* comp : {&jx, &jy, &jz}) {
    Mat total = Mat::Zero(D, D);
    for (int site = 0; site < n; ++site) total += site_gate(spec, site, *comp);
    J2 += total * total;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(J2);
  std::vector<long long> zero_cols;
  for (long long i = 0; i < D; ++i)
    if (es.eigenvalues()(i) < 1e-8) zero_cols.push_back(i);
  if (zero_cols.empty()) {
    std::cerr << "spin_zero_projector: warning, empty spin-0 sector\n";
    return SubspaceProjector(spec, Mat::Zero(D, D));
  }
  Mat P = Mat::Zero(D, D);
  for (long long c : zero_cols)
    P += es.eigenvectors().col(c) * es.eigenvectors().col(c).adjoint();
  return SubspaceProjector(spec, P);
}

// span{(|001>+|010>+|100>)/sqrt(3), |000>} on three qubits
inline SubspaceProjector gss_projector() {
  Vec w = Vec::Zero(8), z = Vec::Zero(8);
  w(1) = w(2) = w(4) = 1.0 / std::sqrt(3.0);
  z(0) = 1.0;
  return SubspaceProjector(HilbertSpec(2, 3), w * w.adjoint() + z * z.adjoint());
}

}  // namespace magicgap
