#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dfrelay {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Time-domain block of M baseband samples (s_m, r_m, z_m, ...).
using TimeBlock = CVector;
// M-point block spectrum (S_l, R_l, ...).
using Spectrum = CVector;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidLength : public Error {
public:
  using Error::Error;
};

class CpTooShort : public Error {
public:
  using Error::Error;
};

class InvalidSymbol : public Error {
public:
  using Error::Error;
};

class SingularSystem : public Error {
public:
  using Error::Error;
};

class MissingTruth : public Error {
public:
  using Error::Error;
};

// Carries the offending configuration key so callers can report it.
class InvalidConfig : public Error {
public:
  InvalidConfig(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  explicit InvalidConfig(const std::string& what) : Error(what) {}

  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

constexpr double kPi = 3.14159265358979323846;

inline bool is_power_of_two(Index m) { return m >= 1 && (m & (m - 1)) == 0; }

// exp(-j 2 pi k l / m), with k*l reduced mod m first so large products stay exact.
inline Complex unit_phasor(Index k, Index l, Index m) {
  const Index r = ((k % m) * (l % m)) % m;
  const Index idx = r < 0 ? r + m : r;
  const double angle = -2.0 * kPi * static_cast<double>(idx) / static_cast<double>(m);
  return {std::cos(angle), std::sin(angle)};
}

} // namespace dfrelay
