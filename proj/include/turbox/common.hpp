#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace turbox {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Tolerance policy for dense double-precision solves on dim <= 16.
inline constexpr double kTolAbs = 1e-10;  // structural zeros
inline constexpr double kTolRel = 1e-8;   // physical relations
inline constexpr double kTolPsd = 1e-9;   // positivity slack
inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 16;

inline constexpr Complex kI{0.0, 1.0};

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define TURBOX_DEFINE_ERROR(Name)                                 \
  struct Name : Error {                                           \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

TURBOX_DEFINE_ERROR(DimensionMismatch);
TURBOX_DEFINE_ERROR(InvalidModel);
TURBOX_DEFINE_ERROR(InconsistentPaths);
TURBOX_DEFINE_ERROR(Disconnected);
TURBOX_DEFINE_ERROR(NotConfined);
TURBOX_DEFINE_ERROR(NonUniqueNullSpace);
TURBOX_DEFINE_ERROR(CrossCheckFailure);
TURBOX_DEFINE_ERROR(SingularGauge);
TURBOX_DEFINE_ERROR(CarnotLimit);
TURBOX_DEFINE_ERROR(GapCollapse);
TURBOX_DEFINE_ERROR(UnknownReservoir);
TURBOX_DEFINE_ERROR(NotQuadratic);
TURBOX_DEFINE_ERROR(AllStartsFailed);
TURBOX_DEFINE_ERROR(IoError);

#undef TURBOX_DEFINE_ERROR

/// |k><l| as a dense dim x dim matrix.
inline Mat matrix_unit(int dim, int k, int l) {
  Mat m = Mat::Zero(dim, dim);
  m(k, l) = 1.0;
  return m;
}

inline bool approx_rel(double a, double b, double tol = kTolRel) {
  double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) <= tol * scale;
}

/// Splitmix/mt19937_64-based uniform draws with a platform-independent
/// mapping from raw 64-bit output, so seeded runs reproduce everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() {
    // xorshift64* keeps the sequence identical across standard libraries.
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545f4914f6cdd1dull;
  }

 private:
  std::uint64_t state_;
};

}  // namespace turbox
