#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tbem {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;
using MatrixXr = Eigen::MatrixXd;
using VectorXr = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kFourPi = 4.0 * std::numbers::pi;

/// Process exit codes shared by the CLI and the probe suite.
enum class ExitCode : int { Pass = 0, ProbeFailure = 1, ConfigError = 2, NumericalFailure = 3 };

/// Base class of all library errors. The code maps onto the CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(const std::string& what, ExitCode code) : std::runtime_error(what), code_(code) {}
  [[nodiscard]] ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Malformed input file or inconsistent mesh data.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what, ExitCode::ConfigError) {}
};

/// Invalid arguments (bad frequency, kernel singularity, wrong part, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what, ExitCode::NumericalFailure) {}
};

/// Configuration errors (unknown key, bad value).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what, ExitCode::ConfigError) {}
};

/// Singular systems, failed solves, non-finite results.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what, ExitCode::NumericalFailure) {}
};

/// Warning sink; replace to silence or capture warnings (tests do both).
inline std::function<void(const std::string&)>& warning_sink() {
  static std::function<void(const std::string&)> sink = [](const std::string& msg) {
    std::cerr << "tbem warning: " << msg << '\n';
  };
  return sink;
}

inline void warn(const std::string& msg) {
  if (warning_sink()) warning_sink()(msg);
}

/// Material coefficients of one subdomain.
struct Material {
  double a = 1.0;
  double p = 1.0;
};

/// Coefficients a_i, p_i of both subdomains.
struct MaterialParams {
  double a1 = 1.0, a2 = 1.0;
  double p1 = 1.0, p2 = 1.0;

  [[nodiscard]] Material of(int subdomain) const {
    if (subdomain == 1) return {a1, p1};
    if (subdomain == 2) return {a2, p2};
    throw DomainError("subdomain index must be 1 or 2, got " + std::to_string(subdomain));
  }

  void validate() const {
    if (!(a1 > 0 && a2 > 0 && p1 > 0 && p2 > 0))
      throw DomainError("material coefficients a1, a2, p1, p2 must be strictly positive");
  }

  static MaterialParams uniform(double a, double p) { return {a, a, p, p}; }
};

inline bool is_finite(const VectorXc& v) { return v.allFinite(); }

}  // namespace tbem
