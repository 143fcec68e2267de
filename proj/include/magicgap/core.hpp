#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace magicgap {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

constexpr double kPi = 3.141592653589793238462643383279502884;

enum class Flavor { OddQudit, EvenQudit, Multiqubit };

inline const char* flavor_name(Flavor f) {
  switch (f) {
    case Flavor::OddQudit: return "odd";
    case Flavor::EvenQudit: return "even";
    case Flavor::Multiqubit: return "multiqubit";
  }
  return "?";
}

// Local dimension d, qudit count n, and the averaging flavor used by the
// three-case intrinsic formulas.
struct HilbertSpec {
  int d = 2;
  int n = 1;
  Flavor flavor = Flavor::Multiqubit;

  HilbertSpec() = default;
  HilbertSpec(int d_, int n_, Flavor f) : d(d_), n(n_), flavor(f) { validate(); }
  HilbertSpec(int d_, int n_) : d(d_), n(n_) {
    flavor = (d % 2 == 1) ? Flavor::OddQudit
             : (d == 2 && n >= 1) ? Flavor::Multiqubit
                                  : Flavor::EvenQudit;
    validate();
  }

  void validate() const {
    if (d < 2) throw std::invalid_argument("HilbertSpec: d must be >= 2");
    if (n < 1) throw std::invalid_argument("HilbertSpec: n must be >= 1");
    double logdim = n * std::log2(double(d));
    if (logdim > 40) throw std::invalid_argument("HilbertSpec: d^n too large");
    if (flavor == Flavor::Multiqubit && d != 2)
      throw std::domain_error("multiqubit flavor requires d = 2");
    if (flavor == Flavor::OddQudit && d % 2 == 0)
      throw std::domain_error("odd-qudit flavor requires odd d");
    if (flavor == Flavor::EvenQudit && d % 2 == 1)
      throw std::domain_error("even-qudit flavor requires even d");
  }

  long long dim() const {
    long long D = 1;
    for (int i = 0; i < n; ++i) D *= d;
    return D;
  }
};

inline long long binom(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace magicgap
