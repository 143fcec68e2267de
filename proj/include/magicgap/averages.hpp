#pragma once

#include <algorithm>
#include <array>
#include <map>

#include "magic.hpp"

namespace magicgap {

struct Embedding {
  HilbertSpec big;
  int small_dim = 0;
  Mat columns;

  Embedding(HilbertSpec b, Mat cols) : big(b), small_dim(int(cols.cols())), columns(std::move(cols)) {
    validate();
  }

  void validate() const {
    if (small_dim < 1 || small_dim > big.dim())
      throw std::invalid_argument("Embedding: need 1 <= d_S <= d_B");
    if (columns.rows() != big.dim() || columns.cols() != small_dim)
      throw std::invalid_argument("Embedding: column shape mismatch");
    Mat g = columns.adjoint() * columns;
    if (!g.isApprox(Mat::Identity(small_dim, small_dim), 1e-10))
      throw std::invalid_argument("Embedding: columns not orthonormal");
  }

  Vec apply(const Vec& small_state) const { return columns * small_state; }
};

struct SubspaceProjector {
  HilbertSpec big;
  Mat matrix;
  int rank = 0;

  SubspaceProjector(HilbertSpec b, Mat m) : big(b), matrix(std::move(m)) {
    const long long D = big.dim();
    if (matrix.rows() != D || matrix.cols() != D)
      throw std::invalid_argument("SubspaceProjector: shape mismatch");
    if (!matrix.isApprox(matrix.adjoint(), 1e-9))
      throw std::invalid_argument("SubspaceProjector: not Hermitian");
    if (!(matrix * matrix).isApprox(matrix, 1e-9))
      throw std::invalid_argument("SubspaceProjector: not idempotent");
    double tr = matrix.trace().real();
    rank = int(std::llround(tr));
    if (std::abs(tr - rank) > 1e-8 || rank < 1)
      throw std::invalid_argument("SubspaceProjector: trace not a positive integer");
  }

  // Orthonormal basis of the range, as an Embedding.
  Embedding basis() const {
    Eigen::SelfAdjointEigenSolver<Mat> es(matrix);
    const long long D = big.dim();
    Mat cols(D, rank);
    int c = 0;
    for (long long i = 0; i < D; ++i)
      if (es.eigenvalues()(i) > 0.5) cols.col(c++) = es.eigenvectors().col(i);
    if (c != rank) throw std::runtime_error("SubspaceProjector: rank/eigenvalue mismatch");
    return Embedding(big, cols);
  }
};

inline SubspaceProjector projector_from_embedding(const Embedding& E) {
  return SubspaceProjector(E.big, E.columns * E.columns.adjoint());
}

// Average intrinsic linear SE of a Haar-random state in dimension d_S.
inline double intrinsic_ase(long long d_S, Flavor flavor) {
  if (d_S < 1) throw std::domain_error("intrinsic_ase: d_S must be >= 1");
  switch (flavor) {
    case Flavor::OddQudit:
      if (d_S % 2 == 0) throw std::domain_error("intrinsic_ase: odd flavor needs odd d_S");
      return 1.0 - 3.0 / double(d_S + 2);
    case Flavor::EvenQudit:
      if (d_S % 2 == 1) throw std::domain_error("intrinsic_ase: even flavor needs even d_S");
      return 1.0 - 3.0 * double(d_S + 2) / (double(d_S + 1) * double(d_S + 3));
    case Flavor::Multiqubit: {
      long long m = d_S;
      while (m % 2 == 0) m /= 2;
      if (m != 1) throw std::domain_error("intrinsic_ase: multiqubit flavor needs d_S = 2^m");
      return 1.0 - 4.0 / double(d_S + 3);
    }
  }
  throw std::domain_error("intrinsic_ase: bad flavor");
}

inline double intrinsic_ase(const HilbertSpec& small) {
  return intrinsic_ase(small.dim(), small.flavor);
}

inline double q_sym_trace(long long D, Flavor flavor) {
  switch (flavor) {
    case Flavor::OddQudit: return double(D + 1) * double(D + 3) / 8.0;
    case Flavor::EvenQudit: return double(D + 2) * double(D + 2) / 8.0;
    case Flavor::Multiqubit: return double(D + 1) * double(D + 2) / 6.0;
  }
  throw std::domain_error("q_sym_trace: bad flavor");
}

inline double q_sym_trace(const HilbertSpec& spec) { return q_sym_trace(spec.dim(), spec.flavor); }

namespace detail {

// The five-term bracket T = Tr(Q Pi^{x4} Pi_sym4) from the characteristic
// function of the projector. Terms 1-4 run over the support set; term 5's
// outer sum runs over every reduced index.
inline double bigguy_trace(const CharFunction& cf) {
  const int d = cf.spec.d, n = cf.spec.n;
  const double dB = double(cf.spec.dim());
  const long long idx = cf.index_count();

  std::vector<long long> supp;
  for (long long f = 0; f < idx; ++f)
    if (std::abs(cf.values[f]) > 1e-12) supp.push_back(f);
  const std::size_t S = supp.size();

  std::vector<SymplecticIndex> sv(S);
  std::vector<cx> chi(S);
  for (std::size_t i = 0; i < S; ++i) {
    sv[i] = unflatten_index(supp[i], d, n);
    chi[i] = cf.values[supp[i]];
  }

  std::vector<cx> taup(2 * d), omp(d);
  for (int e = 0; e < 2 * d; ++e) taup[e] = tau_pow(d, e);
  for (int e = 0; e < d; ++e) omp[e] = omega_pow(d, e);
  auto modp = [](long long v, long long m) { return int(((v % m) + m) % m); };

  cx t1 = 0, t2 = 0, t3 = 0, t4 = 0;
  double t5 = 0;

  for (std::size_t i = 0; i < S; ++i) t1 += std::pow(std::abs(chi[i]), 4);

  RawIndex raw(2 * n);
  for (std::size_t i = 0; i < S; ++i) {
    const auto& a = sv[i];
    double na = std::norm(chi[i]);
    for (std::size_t j = 0; j < S; ++j) {
      const auto& b = sv[j];
      t2 += na * std::norm(chi[j]) * omp[modp(symplectic_raw(a, b), d)];
      for (int t = 0; t < 2 * n; ++t) raw[t] = (long long)b[t] + 2 * a[t];
      t3 += chi[i] * chi[i] * chi[j] * std::conj(eval_char_at(cf, raw));
    }
  }

  for (std::size_t i = 0; i < S; ++i) {
    const auto& a = sv[i];
    for (std::size_t j = 0; j < S; ++j) {
      const auto& b = sv[j];
      long long sab = symplectic_raw(a, b);
      cx chij = chi[i] * chi[j];
      RawIndex ab(2 * n);
      for (int t = 0; t < 2 * n; ++t) ab[t] = (long long)a[t] + b[t];
      for (std::size_t k = 0; k < S; ++k) {
        const auto& c = sv[k];
        for (int t = 0; t < 2 * n; ++t) raw[t] = ab[t] + c[t];
        long long e = sab - symplectic_raw(a, c) - symplectic_raw(c, b);
        t4 += chij * chi[k] * std::conj(eval_char_at(cf, raw)) * taup[modp(e, 2 * d)];
      }
    }
  }

  for (long long f = 0; f < idx; ++f) {
    auto a = unflatten_index(f, d, n);
    cx inner = 0;
    for (std::size_t j = 0; j < S; ++j) {
      const auto& b = sv[j];
      for (int t = 0; t < 2 * n; ++t) raw[t] = (long long)b[t] - 2 * a[t];
      inner += chi[j] * std::conj(eval_char_at(cf, raw));
    }
    t5 += std::norm(inner);
  }

  cx T = (3.0 * dB * dB * t1 + 6.0 * dB * t2 + 6.0 * dB * t3 + 8.0 * t4 + t5) / 24.0;
  if (std::abs(T.imag()) > 1e-8)
    throw std::runtime_error("extrinsic_ase: imaginary residue too large");
  return T.real();
}

}  // namespace detail

inline double extrinsic_ase(const SubspaceProjector& proj) {
  auto cf = char_function(proj.big, proj.matrix);
  double T = detail::bigguy_trace(cf);
  double dB = double(proj.big.dim());
  return 1.0 - dB * T / double(binom(proj.rank + 3, 4));
}

namespace detail {

// Cycle decompositions of all 24 permutations of four slots.
inline const std::vector<std::vector<std::vector<int>>>& s4_cycles() {
  static const auto cycles = [] {
    std::vector<std::vector<std::vector<int>>> out;
    std::array<int, 4> p = {0, 1, 2, 3};
    do {
      std::vector<std::vector<int>> cyc;
      std::array<bool, 4> seen = {};
      for (int s = 0; s < 4; ++s) {
        if (seen[s]) continue;
        std::vector<int> c;
        int cur = s;
        while (!seen[cur]) {
          seen[cur] = true;
          c.push_back(cur);
          cur = p[cur];
        }
        cyc.push_back(std::move(c));
      }
      out.push_back(std::move(cyc));
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
  }();
  return cycles;
}

}  // namespace detail

// The same subspace average computed from fourth moments: compress each
// displacement onto the subspace basis, A_a = B^dag D_a B, and trace the
// four-body operator A x A^dag x A x A^dag against the symmetrizer via its
// permutation expansion. Orders of magnitude faster for repeated evaluation
// (optimization loops); agrees with extrinsic_ase to numerical precision.
inline double subspace_ase_moments(const Embedding& e) {
  const HilbertSpec& spec = e.big;
  const long long D = spec.dim();
  const int r = e.small_dim;
  long long idx = 1;
  for (int i = 0; i < 2 * spec.n; ++i) idx *= spec.d;
  const Mat& B = e.columns;
  const auto& cycles = detail::s4_cycles();
  cx total = 0;
  Mat DB(D, r);
  for (long long f = 0; f < idx; ++f) {
    auto op = displacement(spec, unflatten_index(f, spec.d, spec.n));
    for (long long k = 0; k < D; ++k) DB.row(op.perm[k]) = op.phase[k] * B.row(k);
    Mat A = B.adjoint() * DB;
    Mat Ad = A.adjoint();
    const Mat* X[4] = {&A, &Ad, &A, &Ad};
    for (const auto& cyc : cycles) {
      cx term = 1;
      for (const auto& c : cyc) {
        Mat prod = *X[c[0]];
        for (std::size_t i = 1; i < c.size(); ++i) prod = prod * (*X[c[i]]);
        term *= prod.trace();
      }
      total += term;
    }
  }
  if (std::abs(total.imag()) > 1e-6 * (1.0 + std::abs(total.real())))
    throw std::runtime_error("subspace_ase_moments: imaginary residue too large");
  return 1.0 - total.real() / (24.0 * double(D) * double(binom(r + 3, 4)));
}

inline double ase_gap(const SubspaceProjector& proj, Flavor small_flavor) {
  return extrinsic_ase(proj) - intrinsic_ase(proj.rank, small_flavor);
}

inline double expected_gap_random_subspace(const HilbertSpec& big, long long d_S,
                                           Flavor small_flavor) {
  if (d_S < 1 || d_S > big.dim())
    throw std::invalid_argument("expected_gap_random_subspace: need 1 <= d_S <= d_B");
  return intrinsic_ase(big) - intrinsic_ase(d_S, small_flavor);
}

namespace detail {

// Q = (1/D^2) sum_a D_a x D_a^dag x D_a x D_a^dag, cached per (d, n);
// normalized so that M(psi) = 1 - D Tr(Q psi^{x4}).
inline const Mat& q_operator(const HilbertSpec& spec) {
  static std::map<std::pair<int, int>, Mat> cache;
  auto key = std::make_pair(spec.d, spec.n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const long long D = spec.dim();
  const long long D4 = D * D * D * D;
  Mat Q = Mat::Zero(D4, D4);
  long long idx = 1;
  for (int i = 0; i < 2 * spec.n; ++i) idx *= spec.d;
  for (long long f = 0; f < idx; ++f) {
    auto op = displacement(spec, unflatten_index(f, spec.d, spec.n));
    for (long long k1 = 0; k1 < D; ++k1)
      for (long long k2 = 0; k2 < D; ++k2)
        for (long long k3 = 0; k3 < D; ++k3)
          for (long long k4 = 0; k4 < D; ++k4) {
            // slots 2 and 4 carry D_a^dag = (perm, phase) transposed-conjugated
            long long row = ((op.perm[k1] * D + k2) * D + op.perm[k3]) * D + k4;
            long long col = ((k1 * D + op.perm[k2]) * D + k3) * D + op.perm[k4];
            cx ph = op.phase[k1] * std::conj(op.phase[k2]) * op.phase[k3] *
                    std::conj(op.phase[k4]);
            Q(row, col) += ph / double(D * D);
          }
  }
  return cache.emplace(key, std::move(Q)).first->second;
}

}  // namespace detail

// Independent verification of the closed-form extrinsic average by explicit
// dense contraction against the 24 slot permutations.
inline double dense_average_oracle(const SubspaceProjector& proj) {
  const long long D = proj.big.dim();
  if (D > 6) throw std::invalid_argument("dense_average_oracle: d_B must be <= 6");
  const long long D4 = D * D * D * D;
  const Mat& Q = detail::q_operator(proj.big);
  const Mat& P = proj.matrix;

  Mat P4(D4, D4);
  for (long long i = 0; i < D4; ++i) {
    long long i1 = i / (D * D * D), i2 = (i / (D * D)) % D, i3 = (i / D) % D, i4 = i % D;
    for (long long j = 0; j < D4; ++j) {
      long long j1 = j / (D * D * D), j2 = (j / (D * D)) % D, j3 = (j / D) % D, j4 = j % D;
      P4(i, j) = P(i1, j1) * P(i2, j2) * P(i3, j3) * P(i4, j4);
    }
  }

  std::array<int, 4> perm = {0, 1, 2, 3};
  cx T = 0;
  int count = 0;
  std::vector<long long> sigma_map(D4);
  do {
    for (long long i = 0; i < D4; ++i) {
      long long dig[4] = {i / (D * D * D), (i / (D * D)) % D, (i / D) % D, i % D};
      long long m = 0;
      for (int t = 0; t < 4; ++t) m = m * D + dig[perm[t]];
      sigma_map[i] = m;
    }
    for (long long i = 0; i < D4; ++i)
      for (long long j = 0; j < D4; ++j) T += Q(i, j) * P4(j, sigma_map[i]);
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  T /= double(count);
  if (std::abs(T.imag()) > 1e-8)
    throw std::runtime_error("dense_average_oracle: imaginary residue too large");
  return 1.0 - double(D) * T.real() / double(binom(proj.rank + 3, 4));
}

inline SubspaceProjector invariant_projector(const HilbertSpec& spec,
                                             const std::vector<Mat>& group) {
  if (group.empty()) throw std::invalid_argument("invariant_projector: empty group");
  const long long D = spec.dim();
  for (const auto& g : group) {
    if (g.rows() != D || g.cols() != D)
      throw std::invalid_argument("invariant_projector: element shape mismatch");
  }
  for (const auto& g : group)
    for (const auto& h : group) {
      Mat p = g * h;
      bool found = false;
      for (const auto& e : group)
        if (p.isApprox(e, 1e-8)) {
          found = true;
          break;
        }
      if (!found) throw std::invalid_argument("invariant_projector: not closed under product");
    }
  Mat P = Mat::Zero(D, D);
  for (const auto& g : group) P += g;
  P /= double(group.size());
  return SubspaceProjector(spec, P);
}

inline SubspaceProjector isotypic_projector(const HilbertSpec& spec,
                                            const std::vector<Mat>& group,
                                            const std::vector<cx>& character, int irrep_dim) {
  if (group.size() != character.size())
    throw std::invalid_argument("isotypic_projector: character length mismatch");
  const long long D = spec.dim();
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (group[i].isApprox(Mat::Identity(D, D), 1e-8) &&
        std::abs(character[i] - double(irrep_dim)) > 1e-8)
      throw std::invalid_argument("isotypic_projector: character(identity) != irrep_dim");
  }
  Mat P = Mat::Zero(D, D);
  for (std::size_t i = 0; i < group.size(); ++i)
    P += std::conj(character[i]) * group[i];
  P *= double(irrep_dim) / double(group.size());
  if (!(P * P).isApprox(P, 1e-8))
    throw std::invalid_argument("isotypic_projector: result not idempotent (bad character)");
  return SubspaceProjector(spec, P);
}

}  // namespace magicgap
