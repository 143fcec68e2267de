#pragma once

#include <algorithm>
#include <cstdint>

#include "magic.hpp"
#include "optimize.hpp"

namespace magicgap {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Counter-based generator: the value stream is a pure function of
// (seed, stream, counter), so parallel workers can own disjoint streams and
// reproduce results regardless of scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(detail::splitmix64(detail::splitmix64(seed) ^ stream)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ULL; }

  result_type operator()() { return detail::splitmix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

  double uniform() { return double((*this)() >> 11) * 0x1.0p-53; }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    has_spare_ = true;
    spare_ = r * std::sin(2.0 * kPi * u2);
    return r * std::cos(2.0 * kPi * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0;
};

inline PureState haar_state(long long dim, CounterRng& rng) {
  if (dim < 1) throw std::invalid_argument("haar_state: dim >= 1");
  Vec v(dim);
  for (long long i = 0; i < dim; ++i) v(i) = cx(rng.gaussian(), rng.gaussian());
  return PureState(v / v.norm());
}

// Unitarily invariant random embedding: Gaussian matrix, orthonormalized.
inline Embedding haar_embedding(const HilbertSpec& big, int d_S, CounterRng& rng) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    RVec p(2 * big.dim() * d_S);
    for (long long i = 0; i < p.size(); ++i) p(i) = rng.gaussian();
    try {
      return embedding_from_params(big, d_S, p);
    } catch (const RankDeficientParams&) {
    }
  }
  throw std::runtime_error("haar_embedding: repeated rank deficiency");
}

struct McResult {
  double mean = 0;
  double stderr_ = 0;
  long long samples = 0;
  std::uint64_t seed = 0;
};

inline McResult mc_ase(const Embedding& e, long long samples, std::uint64_t seed,
                       std::uint64_t stream = 0) {
  if (samples < 2) throw std::invalid_argument("mc_ase: samples >= 2");
  double sum = 0, sumsq = 0;
  for (long long i = 0; i < samples; ++i) {
    CounterRng rng(seed, (stream << 32) ^ std::uint64_t(i));
    PureState psi = haar_state(e.small_dim, rng);
    double v = linear_se(e.big, PureState(e.columns * psi.amplitudes));
    sum += v;
    sumsq += v * v;
  }
  double mean = sum / double(samples);
  double var = std::max(0.0, (sumsq / double(samples) - mean * mean)) *
               double(samples) / double(samples - 1);
  return {mean, std::sqrt(var / double(samples)), samples, seed};
}

inline McResult mc_ase(const SubspaceProjector& p, long long samples, std::uint64_t seed,
                       std::uint64_t stream = 0) {
  return mc_ase(p.basis(), samples, seed, stream);
}

// 20 independent runs of 1000 samples; mean of run means, spread of run means.
inline McResult mc_ase_preset(const Embedding& e, std::uint64_t seed) {
  const int runs = 20;
  const long long per = 1000;
  std::vector<double> means;
  for (int r = 0; r < runs; ++r) means.push_back(mc_ase(e, per, seed, r + 1).mean);
  double m = 0;
  for (double v : means) m += v;
  m /= runs;
  double var = 0;
  for (double v : means) var += (v - m) * (v - m);
  var /= (runs - 1);
  return {m, std::sqrt(var / runs), runs * per, seed};
}

inline McResult mc_ase_preset(const SubspaceProjector& p, std::uint64_t seed) {
  return mc_ase_preset(p.basis(), seed);
}

inline std::vector<std::pair<long long, double>> mc_convergence_curve(
    const SubspaceProjector& p, const std::vector<long long>& sample_grid, int repetitions,
    std::uint64_t seed) {
  if (sample_grid.empty()) throw std::invalid_argument("mc_convergence_curve: empty grid");
  for (long long s : sample_grid)
    if (s < 2) throw std::invalid_argument("mc_convergence_curve: samples >= 2");
  if (repetitions < 1) throw std::invalid_argument("mc_convergence_curve: repetitions >= 1");
  const double exact = extrinsic_ase(p);
  Embedding e = p.basis();
  std::vector<std::pair<long long, double>> out;
  for (std::size_t gi = 0; gi < sample_grid.size(); ++gi) {
    std::vector<double> errs;
    for (int r = 0; r < repetitions; ++r) {
      double est = mc_ase(e, sample_grid[gi], seed, gi * repetitions + r + 1).mean;
      errs.push_back((exact - est) * (exact - est));
    }
    std::nth_element(errs.begin(), errs.begin() + errs.size() / 2, errs.end());
    out.emplace_back(sample_grid[gi], errs[errs.size() / 2]);
  }
  return out;
}

struct EnsembleStats {
  double mean_ase = 0;
  double std_ase = 0;  // spread over subspaces
  int num_subspaces = 0;
  long long samples_per = 0;
  std::uint64_t seed = 0;
};

// Per-subspace ASE over Haar-random embeddings; samples_per = 0 uses the
// exact average for each draw.
inline EnsembleStats subspace_ensemble_stats(const HilbertSpec& big, int d_S, int num_subspaces,
                                             long long samples_per, std::uint64_t seed) {
  if (num_subspaces < 1) throw std::invalid_argument("subspace_ensemble_stats: need >= 1 subspace");
  if (d_S < 1 || d_S > big.dim())
    throw std::invalid_argument("subspace_ensemble_stats: need 1 <= d_S <= d_B");
  EnsembleStats st;
  st.num_subspaces = num_subspaces;
  st.samples_per = samples_per;
  st.seed = seed;
  if (d_S == big.dim()) {  // the subspace is unique
    st.mean_ase = intrinsic_ase(big);
    st.std_ase = 0;
    return st;
  }
  std::vector<double> vals;
  for (int s = 0; s < num_subspaces; ++s) {
    CounterRng rng(seed, std::uint64_t(s) | (1ULL << 48));
    Embedding e = haar_embedding(big, d_S, rng);
    double v = samples_per > 0
                   ? mc_ase(e, samples_per, seed, (std::uint64_t(s) << 20) ^ 0xA5A5ULL).mean
                   : extrinsic_ase(projector_from_embedding(e));
    vals.push_back(v);
  }
  double m = 0;
  for (double v : vals) m += v;
  m /= vals.size();
  double var = 0;
  for (double v : vals) var += (v - m) * (v - m);
  st.mean_ase = m;
  st.std_ase = vals.size() > 1 ? std::sqrt(var / (vals.size() - 1)) : 0.0;
  return st;
}

// (E psi + kappa)/sqrt(2) with kappa supported on the orthogonal complement.
inline PureState complement_state(const Embedding& e, const PureState& psi_small,
                                  const PureState& kappa_big) {
  if (e.small_dim == e.big.dim())
    throw std::invalid_argument("complement_state: empty complement (d_S = d_B)");
  if (psi_small.amplitudes.size() != e.small_dim)
    throw std::invalid_argument("complement_state: psi dimension mismatch");
  if (kappa_big.amplitudes.size() != e.big.dim())
    throw std::invalid_argument("complement_state: kappa dimension mismatch");
  if ((e.columns.adjoint() * kappa_big.amplitudes).norm() > 1e-8)
    throw std::invalid_argument("complement_state: kappa not in the complement");
  Vec v = (e.columns * psi_small.amplitudes + kappa_big.amplitudes) / std::sqrt(2.0);
  return PureState(v / v.norm());
}

// Orthonormal basis of the complement of range(E).
inline Mat complement_basis(const Embedding& e) {
  const long long dB = e.big.dim();
  Eigen::HouseholderQR<Mat> qr(e.columns);
  Mat Q = qr.householderQ() * Mat::Identity(dB, dB);
  return Q.rightCols(dB - e.small_dim);
}

struct ComplementResult {
  PureState kappa;
  double value = 0;
};

namespace detail {

inline Vec complement_vector(const Mat& K, const RVec& params) {
  const long long m = K.cols();
  Vec v(m);
  for (long long i = 0; i < m; ++i) v(i) = cx(params(2 * i), params(2 * i + 1));
  double n = v.norm();
  if (n < 1e-10) throw RankDeficientParams();
  return K * (v / n);
}

}  // namespace detail

// Best complement support for one fixed state in the subspace.
inline ComplementResult optimal_complement_per_state(const Embedding& e, const PureState& psi_small,
                                                     int restarts, std::uint64_t seed = 0) {
  if (e.small_dim >= e.big.dim())
    throw std::invalid_argument("optimal_complement_per_state: need d_S < d_B");
  if (restarts < 1) throw std::invalid_argument("optimal_complement_per_state: restarts >= 1");
  const Mat K = complement_basis(e);
  const Vec embedded = e.columns * psi_small.amplitudes;
  auto objective = [&](const RVec& p) {
    Vec kappa = detail::complement_vector(K, p);
    Vec v = (embedded + kappa) / std::sqrt(2.0);
    return linear_se(e.big, PureState(v / v.norm()));
  };
  bool have = false;
  ComplementResult best{PureState(K.col(0)), 0.0};
  for (int r = 0; r < restarts; ++r) {
    CounterRng rng(seed, 0xC0ULL + r);
    RVec x0(2 * K.cols());
    for (long long i = 0; i < x0.size(); ++i) x0(i) = rng.gaussian();
    BfgsResult run;
    try {
      run = bfgs_minimize(objective, std::move(x0));
    } catch (const RankDeficientParams&) {
      continue;
    }
    if (!have || run.value < best.value - 1e-12) {
      best.kappa = PureState(detail::complement_vector(K, run.x));
      best.value = run.value;
      have = true;
    }
  }
  if (!have) throw std::runtime_error("optimal_complement_per_state: all restarts failed");
  return best;
}

struct FixedComplementResult {
  PureState kappa;
  McResult average;  // average SE with the optimal fixed complement
};

// One complement vector minimizing the subspace-averaged SE; the sample set is
// frozen by the seed (common random numbers across candidates).
inline FixedComplementResult optimal_fixed_complement(const Embedding& e, long long samples,
                                                      int restarts, std::uint64_t seed) {
  if (e.small_dim >= e.big.dim())
    throw std::invalid_argument("optimal_fixed_complement: need d_S < d_B");
  if (samples < 2) throw std::invalid_argument("optimal_fixed_complement: samples >= 2");
  if (restarts < 1) throw std::invalid_argument("optimal_fixed_complement: restarts >= 1");
  const Mat K = complement_basis(e);
  std::vector<Vec> embedded;
  for (long long i = 0; i < samples; ++i) {
    CounterRng rng(seed, std::uint64_t(i));
    embedded.push_back(e.columns * haar_state(e.small_dim, rng).amplitudes);
  }
  auto values = [&](const Vec& kappa) {
    std::vector<double> out;
    for (const Vec& w : embedded) {
      Vec v = (w + kappa) / std::sqrt(2.0);
      out.push_back(linear_se(e.big, PureState(v / v.norm())));
    }
    return out;
  };
  auto objective = [&](const RVec& p) {
    double s = 0;
    for (double v : values(detail::complement_vector(K, p))) s += v;
    return s / double(samples);
  };
  bool have = false;
  RVec best_x;
  double best_val = 0;
  for (int r = 0; r < restarts; ++r) {
    CounterRng rng(seed, 0xF1ULL * 65536 + r);
    RVec x0(2 * K.cols());
    for (long long i = 0; i < x0.size(); ++i) x0(i) = rng.gaussian();
    BfgsResult run;
    try {
      run = bfgs_minimize(objective, std::move(x0));
    } catch (const RankDeficientParams&) {
      continue;
    }
    if (!have || run.value < best_val - 1e-12) {
      best_x = run.x;
      best_val = run.value;
      have = true;
    }
  }
  if (!have) throw std::runtime_error("optimal_fixed_complement: all restarts failed");
  Vec kappa = detail::complement_vector(K, best_x);
  auto vals = values(kappa);
  double m = 0, var = 0;
  for (double v : vals) m += v;
  m /= vals.size();
  for (double v : vals) var += (v - m) * (v - m);
  var /= double(vals.size() - 1);
  return {PureState(kappa), {m, std::sqrt(var / double(vals.size())), samples, seed}};
}

}  // namespace magicgap
