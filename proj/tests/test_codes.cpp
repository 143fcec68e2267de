#include <catch2/catch_amalgamated.hpp>
#include <magicgap/codes.hpp>

#include <optional>
#include <random>

using namespace magicgap;

namespace {

// Greedy random isotropic set: keep drawing indices that stay isotropic with
// the current closure; retry until the codespace phases are consistent.
std::optional<IsotropicSet> try_random_isotropic(const HilbertSpec& spec, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> comp(0, spec.d - 1);
  std::vector<SymplecticIndex> gens;
  int attempts = 30;
  while (attempts-- > 0) {
    SymplecticIndex cand(2 * spec.n);
    for (auto& v : cand) v = comp(rng);
    auto trial = gens;
    trial.push_back(cand);
    try {
      auto S = isotropic_from_generators(spec, trial);
      gens = trial;
      if ((int)gens.size() >= spec.n + 1) break;
    } catch (const std::invalid_argument&) {
    }
  }
  try {
    auto S = isotropic_from_generators(spec, gens);
    codespace_projector(S);
    return S;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

Flavor flavor_for(long long d_S, std::mt19937_64& rng) {
  long long m = d_S;
  while (m % 2 == 0) m /= 2;
  if (d_S % 2 == 1) return Flavor::OddQudit;
  if (m == 1 && (rng() & 1)) return Flavor::Multiqubit;
  return Flavor::EvenQudit;
}

}  // namespace

TEST_CASE("closure construction") {
  HilbertSpec six(6, 1);
  auto S = isotropic_from_generators(six, {{2, 0}});
  REQUIRE(S.elements.size() == 3);
  CHECK(S.elements[0] == SymplecticIndex{0, 0});
  CHECK(S.elements[1] == SymplecticIndex{2, 0});
  CHECK(S.elements[2] == SymplecticIndex{4, 0});

  auto trivial = isotropic_from_generators(six, {});
  CHECK(trivial.elements.size() == 1);
  CHECK(codespace_projector(trivial).matrix.isApprox(Mat::Identity(6, 6), 1e-12));

  HilbertSpec four(2, 4);
  auto code = isotropic_from_generators(four, {{1, 0, 1, 0, 1, 0, 1, 0}, {0, 1, 0, 1, 0, 1, 0, 1}});
  CHECK(code.elements.size() == 4);

  CHECK_THROWS_AS(isotropic_from_generators(HilbertSpec(2, 1), {{1, 0}, {0, 1}}),
                  std::invalid_argument);
}

TEST_CASE("codespace projectors") {
  auto codes = builtin_codes();
  auto p422 = codespace_projector(codes.at("422").set);
  REQUIRE(p422.rank == 4);
  Vec cw = Vec::Zero(16);
  cw(0b0000) = cw(0b1111) = 1.0 / std::sqrt(2.0);
  CHECK((p422.matrix * cw).isApprox(cw, 1e-10));

  auto gauge = zd_gauge_set(3, 2);
  auto pg = codespace_projector(gauge);
  REQUIRE(pg.rank == 3);
  HilbertSpec spec(3, 2);
  Mat expect = Mat::Zero(9, 9);
  for (int i = 0; i < 3; ++i) expect += displacement(spec, {i, 0, i, 0}).dense();
  expect /= 3.0;
  CHECK(pg.matrix.isApprox(expect, 1e-10));
}

TEST_CASE("codewords of the 422 code") {
  auto p = codespace_projector(builtin_codes().at("422").set);
  int pairs[4][2] = {{0b0000, 0b1111}, {0b0011, 0b1100}, {0b0101, 0b1010}, {0b0110, 0b1001}};
  Mat span = Mat::Zero(16, 4);
  for (int c = 0; c < 4; ++c) {
    span(pairs[c][0], c) = span(pairs[c][1], c) = 1.0 / std::sqrt(2.0);
  }
  CHECK((p.matrix * span).isApprox(span, 1e-10));
}

TEST_CASE("perp") {
  HilbertSpec six(6, 1);
  auto trivial = isotropic_from_generators(six, {});
  CHECK(perp(trivial).size() == 36);

  auto codes = builtin_codes();
  CHECK(perp(codes.at("422").set).size() == 64);

  std::mt19937_64 rng(3);
  for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 2}, {4, 2}}) {
    HilbertSpec spec(d, n);
    for (int t = 0; t < 10; ++t) {
      auto S = try_random_isotropic(spec, rng);
      if (!S) continue;
      CHECK((long long)perp(*S).size() == spec.dim() * S->code_dim());
    }
  }
}

TEST_CASE("a_set structure") {
  std::mt19937_64 rng(5);
  // d = 2: A_S = S^perp
  for (int t = 0; t < 10; ++t) {
    auto S = try_random_isotropic(HilbertSpec(2, 3), rng);
    if (!S) continue;
    auto A = a_set(*S);
    auto P = perp(*S);
    REQUIRE(A.size() == P.size());
  }
  // odd d: A_S = S
  for (int t = 0; t < 10; ++t) {
    auto S = try_random_isotropic(HilbertSpec(5, 2), rng);
    if (!S) continue;
    auto A = a_set(*S);
    REQUIRE(A.size() == S->elements.size());
    for (const auto& a : A) REQUIRE(S->contains_flat(flatten_index(a, 5)));
  }
  // gauge set cardinalities
  for (int d = 2; d <= 8; ++d) {
    for (int n = 2; n <= 3; ++n) {
      auto A = a_set(zd_gauge_set(d, n));
      long long expect = (d % 2 == 1) ? d : (long long)d << (2 * (n - 1));
      REQUIRE((long long)A.size() == expect);
    }
  }
}

TEST_CASE("closed-form gaps") {
  auto codes = builtin_codes();
  CHECK(std::abs(code_gap_closed_form(codes.at("422").set, Flavor::Multiqubit)) < 1e-12);
  CHECK(std::abs(code_gap_closed_form(codes.at("422").set, Flavor::EvenQudit) + 2.0 / 35.0) < 1e-12);

  // Z_2 gauge at n=3: (4 - 4^{n-1}) / ((d^{n-1}+1)(d^{n-1}+2)(d^{n-1}+3))
  double g = code_gap_closed_form(zd_gauge_set(2, 3), Flavor::EvenQudit);
  CHECK(std::abs(g + 2.0 / 35.0) < 1e-12);
  double g42 = code_gap_closed_form(zd_gauge_set(4, 2), Flavor::EvenQudit);
  CHECK(std::abs(g42) < 1e-12);

  Homomorphism f;
  f.values[1] = 1;
  CHECK_THROWS_AS(code_gap_closed_form(codes.at("422").set, Flavor::Multiqubit, f),
                  std::domain_error);
}

TEST_CASE("closed form matches exact extrinsic gap") {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 2}, {4, 2}, {5, 2}}) {
    HilbertSpec spec(d, n);
    for (int t = 0; t < 8; ++t) {
      auto S = try_random_isotropic(spec, rng);
      if (!S) continue;
      Flavor fl = flavor_for(S->code_dim(), rng);
      double closed = code_gap_closed_form(*S, fl);
      double exact = ase_gap(codespace_projector(*S), fl);
      REQUIRE(std::abs(closed - exact) < 1e-8);
      auto cls = classify_gap(*S, fl);
      if (cls.cls == GapClass::Zero) REQUIRE(std::abs(closed) < 1e-10);
      if (cls.cls == GapClass::Negative) REQUIRE(closed < 1e-10);
      if (cls.cls == GapClass::Positive) REQUIRE(closed > -1e-10);
      ++checked;
    }
  }
  REQUIRE(checked >= 20);
}

TEST_CASE("classify_gap cases") {
  auto S5 = isotropic_from_generators(HilbertSpec(5, 1), {{1, 0}});
  CHECK(classify_gap(S5, Flavor::OddQudit).cls == GapClass::Zero);

  auto S4 = isotropic_from_generators(HilbertSpec(4, 2), {{2, 0, 2, 0}});
  CHECK(classify_gap(S4, Flavor::EvenQudit).cls == GapClass::Negative);
  CHECK(code_gap_closed_form(S4, Flavor::EvenQudit) < 0);

  auto S41 = isotropic_from_generators(HilbertSpec(4, 1), {{2, 0}});
  CHECK(classify_gap(S41, Flavor::EvenQudit).cls == GapClass::Zero);
  CHECK(std::abs(code_gap_closed_form(S41, Flavor::EvenQudit)) < 1e-12);

  auto S6 = isotropic_from_generators(HilbertSpec(6, 1), {{2, 0}});
  CHECK(classify_gap(S6, Flavor::EvenQudit).cls == GapClass::Zero);
  CHECK(std::abs(code_gap_closed_form(S6, Flavor::EvenQudit)) < 1e-12);

  // mixed parity at d = 6 falls through to enumeration
  auto S6m = isotropic_from_generators(HilbertSpec(6, 1), {{3, 0}});
  auto c6 = classify_gap(S6m, Flavor::OddQudit);
  CHECK(c6.cls == GapClass::Unknown);
  double closed = code_gap_closed_form(S6m, Flavor::OddQudit);
  double exact = ase_gap(codespace_projector(S6m), Flavor::OddQudit);
  CHECK(std::abs(closed - exact) < 1e-9);
}

TEST_CASE("builtin 412") {
  auto codes = builtin_codes();
  auto p = codespace_projector(codes.at("412").set, codes.at("412").f);
  REQUIRE(p.rank == 2);
  CHECK(std::abs(extrinsic_ase(p) - 0.2) < 1e-9);
  // range is span{|0 0bar>, |0 1bar>}: contained in the 422 codespace
  auto p422 = codespace_projector(codes.at("422").set);
  CHECK((p422.matrix * p.matrix).isApprox(p.matrix, 1e-9));
}
