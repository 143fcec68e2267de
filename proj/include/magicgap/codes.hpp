#pragma once

#include <map>
#include <set>
#include <sstream>

#include "averages.hpp"

namespace magicgap {

struct IsotropicSet {
  HilbertSpec spec;
  std::vector<SymplecticIndex> elements;  // sorted by flat index, contains 0
  std::vector<SymplecticIndex> generators;

  long long code_dim() const { return spec.dim() / (long long)elements.size(); }

  bool contains_flat(long long f) const {
    return std::binary_search(flat_.begin(), flat_.end(), f);
  }

  std::vector<long long> flat_;  // sorted flat indices of elements
};

// Phase assignment a -> omega^{f(a)} for the codespace sum. For odd d a
// consistent f is an additive homomorphism; for even d the symplectic cocycle
// can force non-additive sign assignments (consistency is enforced by the
// idempotency and rank checks of codespace_projector).
struct Homomorphism {
  // flat element index -> value mod d; empty map means trivial
  std::map<long long, int> values;

  bool trivial() const {
    for (auto& [k, v] : values)
      if (v != 0) return false;
    return true;
  }

  int at(long long flat) const {
    auto it = values.find(flat);
    return it == values.end() ? 0 : it->second;
  }
};

inline IsotropicSet isotropic_from_generators(const HilbertSpec& spec,
                                              const std::vector<SymplecticIndex>& gens) {
  const int d = spec.d, n = spec.n;
  for (const auto& g : gens) {
    if ((int)g.size() != 2 * n)
      throw std::invalid_argument("isotropic_from_generators: generator length != 2n");
    for (int v : g)
      if (v < 0 || v >= d)
        throw std::invalid_argument("isotropic_from_generators: component out of range");
  }
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i; j < gens.size(); ++j)
      if (detail::symplectic_raw(gens[i], gens[j]) % d != 0)
        throw std::invalid_argument("isotropic_from_generators: generators not isotropic");

  const long long limit = spec.dim();
  std::set<long long> closure = {0};
  std::vector<SymplecticIndex> frontier = {SymplecticIndex(2 * n, 0)};
  for (const auto& g : gens) {
    // multiply existing closure by powers of g
    std::vector<SymplecticIndex> current;
    for (long long f : closure) current.push_back(unflatten_index(f, d, n));
    for (const auto& e : current) {
      SymplecticIndex cur = e;
      for (int p = 0; p < d; ++p) {
        for (int t = 0; t < 2 * n; ++t) cur[t] = (e[t] + (p + 1) * g[t]) % d;
        closure.insert(flatten_index(cur, d));
        if ((long long)closure.size() > limit)
          throw std::invalid_argument("isotropic_from_generators: closure exceeds d^n");
      }
    }
  }
  IsotropicSet S;
  S.spec = spec;
  S.generators = gens;
  for (long long f : closure) {
    S.flat_.push_back(f);
    S.elements.push_back(unflatten_index(f, d, n));
  }
  // invariants: pairwise isotropy and size divides d^n
  for (const auto& a : S.elements)
    for (const auto& b : S.elements)
      if (detail::symplectic_raw(a, b) % d != 0)
        throw std::invalid_argument("isotropic_from_generators: closure not isotropic");
  if (spec.dim() % (long long)S.elements.size() != 0)
    throw std::invalid_argument("isotropic_from_generators: size does not divide d^n");
  return S;
}

inline SubspaceProjector codespace_projector(const IsotropicSet& S,
                                             const Homomorphism& f = {}) {
  const HilbertSpec& spec = S.spec;
  const long long D = spec.dim();
  Mat P = Mat::Zero(D, D);
  for (std::size_t i = 0; i < S.elements.size(); ++i) {
    cx ph = detail::omega_pow(spec.d, f.at(S.flat_[i]));
    auto op = displacement(spec, S.elements[i]);
    for (long long k = 0; k < D; ++k) P(op.perm[k], k) += ph * op.phase[k];
  }
  P /= double(S.elements.size());
  SubspaceProjector proj = [&] {
    try {
      return SubspaceProjector(spec, std::move(P));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string("codespace_projector: phase-inconsistent set (") +
                                  e.what() + ")");
    }
  }();
  if (proj.rank != S.code_dim())
    throw std::invalid_argument("codespace_projector: rank != d^n/|S| (phase inconsistency)");
  return proj;
}

inline long long index_count(const HilbertSpec& spec) {
  long long c = 1;
  for (int i = 0; i < 2 * spec.n; ++i) c *= spec.d;
  return c;
}

inline std::vector<SymplecticIndex> perp(const IsotropicSet& S) {
  const int d = S.spec.d, n = S.spec.n;
  const auto& gens = S.generators.empty() ? S.elements : S.generators;
  std::vector<SymplecticIndex> out;
  const long long idx = index_count(S.spec);
  for (long long f = 0; f < idx; ++f) {
    auto a = unflatten_index(f, d, n);
    bool ok = true;
    for (const auto& b : gens)
      if (detail::symplectic_raw(a, b) % d != 0) {
        ok = false;
        break;
      }
    if (ok) out.push_back(a);
  }
  long long expect = S.spec.dim() * S.code_dim();
  if ((long long)out.size() != expect)
    throw std::runtime_error("perp: cardinality != d_B * d_S");
  return out;
}

// A_S = { a : 2a in S and a in S^perp }
inline std::vector<SymplecticIndex> a_set(const IsotropicSet& S) {
  const int d = S.spec.d, n = S.spec.n;
  const long long idx = index_count(S.spec);
  if (idx > 100000000LL) throw std::invalid_argument("a_set: index space too large");
  const auto& gens = S.generators.empty() ? S.elements : S.generators;
  std::vector<SymplecticIndex> out;
  for (long long f = 0; f < idx; ++f) {
    auto a = unflatten_index(f, d, n);
    SymplecticIndex two(2 * n);
    for (int t = 0; t < 2 * n; ++t) two[t] = (2 * a[t]) % d;
    if (!S.contains_flat(flatten_index(two, d))) continue;
    bool ok = true;
    for (const auto& b : gens)
      if (detail::symplectic_raw(a, b) % d != 0) {
        ok = false;
        break;
      }
    if (ok) out.push_back(a);
  }
  return out;
}

inline double code_gap_closed_form(const IsotropicSet& S, Flavor small_flavor,
                                   const Homomorphism& f = {}) {
  if (!f.trivial())
    throw std::domain_error("code_gap_closed_form: only the trivial homomorphism is supported");
  const double dB = double(S.spec.dim());
  const double dS = double(S.code_dim());
  double alpha;
  switch (small_flavor) {
    case Flavor::OddQudit:
      if (S.code_dim() % 2 == 0) throw std::domain_error("odd flavor needs odd d_S");
      alpha = 1.0;
      break;
    case Flavor::EvenQudit:
      if (S.code_dim() % 2 == 1) throw std::domain_error("even flavor needs even d_S");
      alpha = 4.0;
      break;
    case Flavor::Multiqubit: {
      long long m = S.code_dim();
      while (m % 2 == 0) m /= 2;
      if (m != 1) throw std::domain_error("multiqubit flavor needs d_S = 2^m");
      alpha = dS * dS;
      break;
    }
    default:
      throw std::domain_error("bad flavor");
  }
  double card = double(a_set(S).size());
  return (alpha * dB - card * dS) / (dB * (dS + 1) * (dS + 2) * (dS + 3));
}

enum class GapClass { Zero, Negative, Positive, Unknown };

struct GapClassification {
  GapClass cls;
  std::string reason;
};

// Sufficient-condition classifier; no A_S enumeration.
inline GapClassification classify_gap(const IsotropicSet& S, Flavor small_flavor) {
  const int d = S.spec.d;
  const long long dS = S.code_dim();
  if (d % 2 == 1) return {GapClass::Zero, "odd local dimension: A_S = S and the gap vanishes"};
  if (d == 2) {
    if (small_flavor == Flavor::Multiqubit)
      return {GapClass::Zero, "qubit code compared as multiqubit: A_S = S^perp saturates"};
    if (dS > 1)
      return {GapClass::Negative, "qubit code compared as even qudit: alpha = 4 < d_S^2 regime"};
    return {GapClass::Zero, "one-dimensional codespace"};
  }
  if (dS % 2 == 0) {
    bool all_even = true;
    for (const auto& a : S.elements)
      for (int v : a)
        if (v % 2 != 0) {
          all_even = false;
          break;
        }
    if (all_even) {
      if (S.spec.n == 1)
        return {GapClass::Zero, "even d, S inside 2Z_d^{2n}, single qudit"};
      return {GapClass::Negative, "even d, S inside 2Z_d^{2n}, n > 1"};
    }
  }
  return {GapClass::Unknown, "no sufficient condition applies; enumerate A_S"};
}

inline IsotropicSet zd_gauge_set(int d, int n) {
  if (d < 2 || n < 2) throw std::invalid_argument("zd_gauge_set: need d >= 2, n >= 2");
  HilbertSpec spec(d, n);
  SymplecticIndex gen(2 * n, 0);
  for (int i = 0; i < n; ++i) gen[2 * i] = 1;
  return isotropic_from_generators(spec, {gen});
}

// Phase assignment making {omega^{f(a)} D_a} the group generated by the
// operators D_{g} in the given order: each element is the ordered product of
// generator powers, and f absorbs the accumulated tau phases (always even
// exponents for commuting isotropic generators).
inline Homomorphism phases_from_generators(const IsotropicSet& S) {
  const int d = S.spec.d, n = S.spec.n;
  Homomorphism f;
  std::vector<int> powers(S.generators.size(), 0);
  // enumerate all generator-power combinations
  long long total = 1;
  for (std::size_t i = 0; i < S.generators.size(); ++i) total *= d;
  for (long long c = 0; c < total; ++c) {
    long long r = c;
    for (std::size_t i = 0; i < powers.size(); ++i) {
      powers[i] = int(r % d);
      r /= d;
    }
    SymplecticIndex cur(2 * n, 0);
    long long exponent = 0;
    for (std::size_t i = 0; i < powers.size(); ++i)
      for (int p = 0; p < powers[i]; ++p) {
        auto [e, next] = mul_indices(cur, S.generators[i], d);
        exponent += e;
        cur = next;
      }
    long long em = ((exponent % (2 * d)) + 2 * d) % (2 * d);
    if (em % 2 != 0)
      throw std::runtime_error("phases_from_generators: odd tau exponent");
    long long flat = flatten_index(cur, d);
    int val = int((em / 2) % d);
    auto it = f.values.find(flat);
    if (it != f.values.end() && it->second != val)
      throw std::runtime_error("phases_from_generators: inconsistent phases");
    f.values[flat] = val;
  }
  return f;
}

struct BuiltinCode {
  IsotropicSet set;
  Homomorphism f;
};

inline std::map<std::string, BuiltinCode> builtin_codes() {
  std::map<std::string, BuiltinCode> out;
  HilbertSpec four(2, 4);
  SymplecticIndex xxxx = {1, 0, 1, 0, 1, 0, 1, 0};
  SymplecticIndex zzzz = {0, 1, 0, 1, 0, 1, 0, 1};
  out.emplace("422", BuiltinCode{isotropic_from_generators(four, {xxxx, zzzz}), {}});
  // [[4,1,2]]: gauge-fix the first logical qubit with Z x Z x I x I; the
  // accumulated operator signs are a non-additive assignment here.
  SymplecticIndex zzii = {0, 1, 0, 1, 0, 0, 0, 0};
  auto s412 = isotropic_from_generators(four, {xxxx, zzzz, zzii});
  auto f412 = phases_from_generators(s412);
  out.emplace("412", BuiltinCode{std::move(s412), std::move(f412)});
  return out;
}

}  // namespace magicgap
