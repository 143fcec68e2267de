#include <catch2/catch_amalgamated.hpp>
#include <magicgap/averages.hpp>

#include <random>

using namespace magicgap;

namespace {

Mat haar_isometry(long long D, int r, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat A(D, r);
  for (long long i = 0; i < D; ++i)
    for (int j = 0; j < r; ++j) A(i, j) = cx(g(rng), g(rng));
  Eigen::HouseholderQR<Mat> qr(A);
  Mat Q = qr.householderQ() * Mat::Identity(D, r);
  return Q;
}

SubspaceProjector random_projector(const HilbertSpec& spec, int r, std::mt19937_64& rng) {
  Mat B = haar_isometry(spec.dim(), r, rng);
  return SubspaceProjector(spec, B * B.adjoint());
}

SubspaceProjector gss_projector_3q() {
  Vec v1 = Vec::Zero(8), v2 = Vec::Zero(8);
  v1(1) = v1(2) = v1(4) = 1.0 / std::sqrt(3.0);
  v2(0) = 1.0;
  Mat P = v1 * v1.adjoint() + v2 * v2.adjoint();
  return SubspaceProjector(HilbertSpec(2, 3), P);
}

Mat p422() {
  Mat P = Mat::Zero(16, 16);
  int pairs[4][2] = {{0b0000, 0b1111}, {0b0011, 0b1100}, {0b0101, 0b1010}, {0b0110, 0b1001}};
  for (auto& pr : pairs) {
    Vec v = Vec::Zero(16);
    v(pr[0]) = v(pr[1]) = 1.0 / std::sqrt(2.0);
    P += v * v.adjoint();
  }
  return P;
}

}  // namespace

TEST_CASE("intrinsic closed forms") {
  CHECK(std::abs(intrinsic_ase(2, Flavor::Multiqubit) - 0.2) < 1e-12);
  CHECK(std::abs(intrinsic_ase(2, Flavor::EvenQudit) - 0.2) < 1e-12);
  CHECK(std::abs(intrinsic_ase(3, Flavor::OddQudit) - 0.4) < 1e-12);
  CHECK(std::abs(intrinsic_ase(5, Flavor::OddQudit) - 4.0 / 7.0) < 1e-12);
  CHECK(std::abs(intrinsic_ase(4, Flavor::Multiqubit) - 3.0 / 7.0) < 1e-12);
  CHECK(std::abs(intrinsic_ase(4, Flavor::EvenQudit) - 17.0 / 35.0) < 1e-12);
  CHECK_THROWS_AS(intrinsic_ase(3, Flavor::EvenQudit), std::domain_error);
  CHECK_THROWS_AS(intrinsic_ase(6, Flavor::Multiqubit), std::domain_error);
}

TEST_CASE("q_sym_trace") {
  CHECK(std::abs(q_sym_trace(2, Flavor::Multiqubit) - 2.0) < 1e-12);
  CHECK(std::abs(q_sym_trace(3, Flavor::OddQudit) - 3.0) < 1e-12);
  for (long long D = 1; D <= 64; ++D) {
    std::vector<Flavor> fl;
    if (D % 2 == 1) fl.push_back(Flavor::OddQudit);
    if (D % 2 == 0) fl.push_back(Flavor::EvenQudit);
    long long m = D;
    while (m % 2 == 0) m /= 2;
    if (m == 1 && D > 1) fl.push_back(Flavor::Multiqubit);
    for (Flavor f : fl) {
      double lhs = 1.0 - double(D) * q_sym_trace(D, f) / double(binom(D + 3, 4));
      REQUIRE(std::abs(lhs - intrinsic_ase(D, f)) < 1e-12);
    }
  }
}

TEST_CASE("extrinsic of the full space is intrinsic") {
  for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {3, 1}, {5, 1}, {4, 1}}) {
    HilbertSpec spec(d, n);
    SubspaceProjector full(spec, Mat::Identity(spec.dim(), spec.dim()));
    REQUIRE(std::abs(extrinsic_ase(full) - intrinsic_ase(spec)) < 1e-10);
  }
}

TEST_CASE("reference fractions") {
  auto gss = gss_projector_3q();
  CHECK(std::abs(extrinsic_ase(gss) - 5.0 / 9.0) < 1e-9);
  CHECK(std::abs(ase_gap(gss, Flavor::Multiqubit) - 16.0 / 45.0) < 1e-9);

  SubspaceProjector gss8(HilbertSpec(8, 1), gss.matrix);
  CHECK(std::abs(extrinsic_ase(gss8) - 83.0 / 135.0) < 1e-9);
  CHECK(std::abs(ase_gap(gss8, Flavor::Multiqubit) - 56.0 / 135.0) < 1e-9);

  SubspaceProjector code(HilbertSpec(2, 4), p422());
  CHECK(std::abs(extrinsic_ase(code) - 3.0 / 7.0) < 1e-9);
  CHECK(std::abs(ase_gap(code, Flavor::Multiqubit)) < 1e-9);
  CHECK(std::abs(ase_gap(code, Flavor::EvenQudit) + 2.0 / 35.0) < 1e-9);
}

TEST_CASE("rank-1 extrinsic equals linear SE") {
  std::mt19937_64 rng(31);
  for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 2}, {3, 1}, {5, 1}}) {
    HilbertSpec spec(d, n);
    for (int t = 0; t < 5; ++t) {
      Mat B = haar_isometry(spec.dim(), 1, rng);
      SubspaceProjector p(spec, B * B.adjoint());
      PureState psi(B.col(0));
      REQUIRE(std::abs(extrinsic_ase(p) - linear_se(spec, psi)) < 1e-9);
    }
  }
}

TEST_CASE("dense oracle agreement") {
  std::mt19937_64 rng(17);
  for (int dB : {2, 3, 4, 5}) {
    HilbertSpec spec(dB, 1);
    for (int r = 1; r <= dB; ++r) {
      for (int t = 0; t < 3; ++t) {
        auto p = random_projector(spec, r, rng);
        REQUIRE(std::abs(extrinsic_ase(p) - dense_average_oracle(p)) < 1e-8);
      }
    }
  }
  HilbertSpec qq(2, 2);
  for (int r = 1; r <= 4; ++r) {
    auto p = random_projector(qq, r, rng);
    REQUIRE(std::abs(extrinsic_ase(p) - dense_average_oracle(p)) < 1e-8);
  }
  HilbertSpec s6(6, 1);
  auto p6 = random_projector(s6, 3, rng);
  CHECK(std::abs(extrinsic_ase(p6) - dense_average_oracle(p6)) < 1e-8);
  HilbertSpec s7(7, 1);
  CHECK_THROWS_AS(dense_average_oracle(random_projector(s7, 2, rng)), std::invalid_argument);
}

TEST_CASE("moment evaluation agrees with the characteristic-function formula") {
  std::mt19937_64 rng(41);
  for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {2, 3}, {3, 1}, {4, 1},
                                                      {5, 1}, {6, 1}, {3, 2}}) {
    HilbertSpec spec(d, n);
    for (int t = 0; t < 3; ++t) {
      int r = 1 + int(rng() % spec.dim());
      Mat B = haar_isometry(spec.dim(), r, rng);
      Embedding e(spec, B);
      SubspaceProjector p(spec, B * B.adjoint());
      REQUIRE(std::abs(subspace_ase_moments(e) - extrinsic_ase(p)) < 1e-9);
    }
  }
}

TEST_CASE("Clifford covariance of extrinsic average") {
  std::mt19937_64 rng(23);
  for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 2}, {3, 1}, {4, 1}}) {
    HilbertSpec spec(d, n);
    for (int t = 0; t < 5; ++t) {
      auto p = random_projector(spec, 2, rng);
      Mat C = random_clifford(spec, rng);
      SubspaceProjector moved(spec, C * p.matrix * C.adjoint());
      REQUIRE(std::abs(extrinsic_ase(p) - extrinsic_ase(moved)) < 1e-9);
    }
  }
}

TEST_CASE("expected gap for random subspaces") {
  HilbertSpec big(2, 5);
  CHECK(std::abs(expected_gap_random_subspace(big, 32, Flavor::Multiqubit)) < 1e-14);
  // near-full even-qudit subspaces go negative
  CHECK(expected_gap_random_subspace(big, 30, Flavor::EvenQudit) < 0);
  CHECK(expected_gap_random_subspace(big, 16, Flavor::EvenQudit) > 0);
  CHECK(expected_gap_random_subspace(HilbertSpec(8, 1), 3, Flavor::OddQudit) > 0);
}

TEST_CASE("invariant projector") {
  HilbertSpec spec(3, 2);
  const long long D = spec.dim();
  SubspaceProjector id = invariant_projector(spec, {Mat::Identity(D, D)});
  CHECK(id.rank == D);

  // Z_3 gauge group {X^i x X^i}
  std::vector<Mat> group;
  for (int i = 0; i < 3; ++i) {
    SymplecticIndex a = {i, 0, i, 0};
    group.push_back(displacement(spec, a).dense());
  }
  auto P = invariant_projector(spec, group);
  CHECK(P.rank == 3);
  double expected_rank = 0;
  for (const auto& g : group) expected_rank += g.trace().real();
  CHECK(std::abs(P.rank - expected_rank / 3.0) < 1e-9);

  std::vector<Mat> not_group = {Mat::Identity(D, D), group[1] * 0.5};
  CHECK_THROWS_AS(invariant_projector(spec, not_group), std::invalid_argument);
}

TEST_CASE("isotypic projectors") {
  // S_2 swap action on two qubits
  HilbertSpec spec(2, 2);
  Mat swap = Mat::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1;
  std::vector<Mat> s2 = {Mat::Identity(4, 4), swap};
  auto sym = isotypic_projector(spec, s2, {1, 1}, 1);
  auto anti = isotypic_projector(spec, s2, {1, -1}, 1);
  CHECK(sym.rank == 3);
  CHECK(anti.rank == 1);
  CHECK((sym.matrix + anti.matrix).isApprox(Mat::Identity(4, 4), 1e-10));

  // full character table of Z_3 in the regular representation
  HilbertSpec z3(3, 1);
  Mat X = displacement(z3, {1, 0}).dense();
  std::vector<Mat> g = {Mat::Identity(3, 3), X, X * X};
  cx w = std::polar(1.0, 2.0 * kPi / 3.0);
  Mat total = Mat::Zero(3, 3);
  for (int r = 0; r < 3; ++r) {
    std::vector<cx> chi = {1.0, std::pow(w, r), std::pow(w, 2 * r)};
    total += isotypic_projector(z3, g, chi, 1).matrix;
  }
  CHECK(total.isApprox(Mat::Identity(3, 3), 1e-10));
}
