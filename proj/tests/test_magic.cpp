#include <catch2/catch_amalgamated.hpp>
#include <magicgap/magic.hpp>

#include <random>

using namespace magicgap;

namespace {

PureState haar(long long dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec v(dim);
  for (long long i = 0; i < dim; ++i) v(i) = cx(g(rng), g(rng));
  return PureState(v / v.norm());
}

PureState basis_state(long long dim, long long k) {
  Vec v = Vec::Zero(dim);
  v(k) = 1;
  return PureState(v);
}

PureState t_state() {
  Vec v(2);
  v << 1.0, std::polar(1.0, kPi / 4);
  return PureState(v / std::sqrt(2.0));
}

}  // namespace

TEST_CASE("char_function basics") {
  HilbertSpec q(2, 1);
  auto cfI = char_function(q, Mat::Identity(2, 2));
  CHECK(std::abs(cfI.values[0] - 1.0) < 1e-13);
  for (int f = 1; f < 4; ++f) CHECK(std::abs(cfI.values[f]) < 1e-13);

  Mat P00 = Mat::Zero(2, 2);
  P00(0, 0) = 1;
  auto cf = char_function(q, P00);
  CHECK(std::abs(cf.values[flatten_index({0, 0}, 2)] - 0.5) < 1e-13);
  CHECK(std::abs(cf.values[flatten_index({0, 1}, 2)] - 0.5) < 1e-13);
  CHECK(std::abs(cf.values[flatten_index({1, 0}, 2)]) < 1e-13);
  CHECK(std::abs(cf.values[flatten_index({1, 1}, 2)]) < 1e-13);
}

TEST_CASE("char_function Parseval and Hermitian symmetry") {
  std::mt19937_64 rng(5);
  for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 2}, {3, 1}, {4, 1}}) {
    HilbertSpec spec(d, n);
    const long long D = spec.dim();
    std::normal_distribution<double> g;
    Mat A(D, D);
    for (long long i = 0; i < D; ++i)
      for (long long j = 0; j < D; ++j) A(i, j) = cx(g(rng), g(rng));
    Mat O = A + A.adjoint();
    auto cf = char_function(spec, O);
    double sum = 0;
    for (auto& v : cf.values) sum += std::norm(v);
    double expect = (O.adjoint() * O).trace().real() / double(D);
    CHECK(std::abs(sum - expect) < 1e-9 * std::abs(expect));
    // chi_{-a} = sign * conj(chi_a)
    for (long long f = 0; f < (long long)cf.values.size(); ++f) {
      auto a = unflatten_index(f, d, n);
      RawIndex neg(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) neg[i] = -(long long)a[i];
      cx lhs = eval_char_at(cf, neg);
      REQUIRE(std::abs(lhs - std::conj(cf.values[f])) < 1e-10);
    }
  }
}

TEST_CASE("eval_char_at periodicity") {
  HilbertSpec q(2, 1);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  Mat A(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) A(i, j) = cx(g(rng), g(rng));
  Mat O = A + A.adjoint();
  auto cf = char_function(q, O);
  CHECK(std::abs(eval_char_at(cf, {2, 1}) + cf.values[flatten_index({0, 1}, 2)]) < 1e-13);
  CHECK(std::abs(eval_char_at(cf, {0, 1}) - cf.values[flatten_index({0, 1}, 2)]) < 1e-13);
}

TEST_CASE("wh_distribution") {
  HilbertSpec q(2, 1);
  auto P = wh_distribution(q, basis_state(2, 0));
  REQUIRE(P.size() == 4);
  CHECK(std::abs(P[flatten_index({0, 0}, 2)] - 0.5) < 1e-12);
  CHECK(std::abs(P[flatten_index({0, 1}, 2)] - 0.5) < 1e-12);
  CHECK(std::abs(P[flatten_index({1, 0}, 2)]) < 1e-12);
  CHECK(std::abs(P[flatten_index({1, 1}, 2)]) < 1e-12);

  std::mt19937_64 rng(2);
  for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 3}, {3, 2}, {5, 1}}) {
    HilbertSpec spec(d, n);
    auto psi = haar(spec.dim(), rng);
    auto Pd = wh_distribution(spec, psi);
    double s = 0;
    for (double p : Pd) s += p;
    CHECK(std::abs(s - 1.0) < 1e-8);
  }
}

TEST_CASE("wh_distribution matches direct sparse expectation") {
  std::mt19937_64 rng(4);
  for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {4, 1}, {6, 1}}) {
    HilbertSpec spec(d, n);
    auto psi = haar(spec.dim(), rng);
    auto P = wh_distribution(spec, psi);
    long long idx = 1;
    for (int i = 0; i < 2 * n; ++i) idx *= d;
    for (long long f = 0; f < idx; ++f) {
      auto a = unflatten_index(f, d, n);
      cx e = displacement(spec, a).expectation(psi.amplitudes);
      REQUIRE(std::abs(P[f] - std::norm(e) / double(spec.dim())) < 1e-11);
    }
  }
}

TEST_CASE("linear_se reference values") {
  HilbertSpec q(2, 1);
  CHECK(linear_se(q, basis_state(2, 0)) < 1e-12);
  CHECK(std::abs(linear_se(q, t_state()) - 0.25) < 1e-12);
}

TEST_CASE("renyi_se and bridges") {
  HilbertSpec q(2, 1);
  CHECK(std::abs(renyi_se(q, t_state(), 2.0) + std::log(3.0 / 4.0)) < 1e-12);
  CHECK(renyi_se(q, basis_state(2, 1), 2.0) < 1e-12);
  CHECK_THROWS_AS(renyi_se(q, t_state(), 1.0), std::domain_error);

  std::mt19937_64 rng(6);
  for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 2}, {3, 1}, {5, 1}}) {
    HilbertSpec spec(d, n);
    for (int t = 0; t < 10; ++t) {
      auto psi = haar(spec.dim(), rng);
      double M = linear_se(spec, psi);
      double M2 = renyi_se(spec, psi, 2.0);
      REQUIRE(std::abs(M2 + std::log(1.0 - M)) < 1e-10);
      // monotone in alpha
      double prev = renyi_se(spec, psi, 0.5);
      for (double a : {1.5, 2.0, 3.0}) {
        double cur = renyi_se(spec, psi, a);
        REQUIRE(cur <= prev + 1e-10);
        prev = cur;
      }
    }
  }
}

TEST_CASE("additivity under tensor product") {
  std::mt19937_64 rng(8);
  HilbertSpec a(3, 1), b(3, 2), ab(3, 3);
  for (int t = 0; t < 10; ++t) {
    auto psi = haar(3, rng);
    auto phi = haar(9, rng);
    Vec prod(27);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 9; ++j) prod(i * 9 + j) = psi.amplitudes(i) * phi.amplitudes(j);
    PureState joint(prod);
    double m2 = renyi_se(ab, joint, 2.0);
    REQUIRE(std::abs(m2 - renyi_se(a, psi, 2.0) - renyi_se(b, phi, 2.0)) < 1e-10);
    // linear SE composes through 1 - M factors
    double M = linear_se(ab, joint);
    REQUIRE(std::abs((1 - M) - (1 - linear_se(a, psi)) * (1 - linear_se(b, phi))) < 1e-9);
  }
}

TEST_CASE("st_norm") {
  HilbertSpec q(2, 1);
  CHECK(std::abs(st_norm(q, basis_state(2, 0)) - 1.0) < 1e-12);
  CHECK(std::abs(st_norm(q, t_state()) - (1.0 + std::sqrt(2.0)) / 2.0) < 1e-12);

  std::mt19937_64 rng(10);
  HilbertSpec f(5, 1);
  for (int t = 0; t < 100; ++t) {
    auto psi = haar(5, rng);
    double sn = st_norm(f, psi);
    REQUIRE(sn >= 1.0 - 1e-10);
    double mhalf = renyi_se(f, psi, 0.5);
    REQUIRE(std::abs(sn - std::exp(mhalf / 2.0)) < 1e-9);
    REQUIRE(renyi_se(f, psi, 2.0) <= mhalf + 1e-10);
  }
}

TEST_CASE("robustness lower bound") {
  CHECK(std::abs(robustness_lower_bound(0.0) - 1.0) < 1e-15);
  CHECK(std::abs(robustness_lower_bound(0.75) - 2.0) < 1e-15);
  CHECK(std::abs(robustness_lower_bound(0.25) - std::sqrt(4.0 / 3.0)) < 1e-15);
  CHECK_THROWS_AS(robustness_lower_bound(1.0), std::domain_error);
}

TEST_CASE("se upper bound") {
  HilbertSpec q(2, 1);
  CHECK(std::abs(se_upper_bound(q, 2.0) - std::log(3.0 / 2.0)) < 1e-12);
  double prev = 0;
  for (int d : {3, 5, 7, 9, 11}) {
    HilbertSpec s(d, 1);
    double b = se_upper_bound(s, 2.0);
    CHECK(b > prev);
    prev = b;
  }
  std::mt19937_64 rng(12);
  HilbertSpec f(7, 1);
  for (int t = 0; t < 100; ++t) {
    auto psi = haar(7, rng);
    REQUIRE(renyi_se(f, psi, 2.0) <= se_upper_bound(f, 2.0) + 1e-10);
  }
  HilbertSpec v(5, 1);
  for (int t = 0; t < 100; ++t) {
    auto psi = haar(5, rng);
    REQUIRE(renyi_se(v, psi, 2.0) <= se_upper_bound(v, 2.0) + 1e-10);
  }
}

TEST_CASE("faithfulness on Clifford orbit and invariance") {
  std::mt19937_64 rng(21);
  for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 3}, {3, 2}, {5, 1}}) {
    HilbertSpec spec(d, n);
    const long long D = spec.dim();
    for (long long k = 0; k < D; ++k) REQUIRE(linear_se(spec, basis_state(D, k)) < 1e-10);
    for (int t = 0; t < 25; ++t) {
      Mat C = random_clifford(spec, rng);
      PureState orbit(C.col(0));
      REQUIRE(linear_se(spec, orbit) < 1e-10);
      auto psi = haar(D, rng);
      PureState moved(C * psi.amplitudes);
      REQUIRE(std::abs(linear_se(spec, moved) - linear_se(spec, psi)) < 1e-9);
    }
  }
}
