#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsr {

using cd = std::complex<double>;
using cvec = std::vector<cd>;
using rvec = std::vector<double>;

inline constexpr cd I{0.0, 1.0};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BranchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ToleranceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// principal branch, cut on (-inf, 0]
cd principal_sqrt(cd z);

double norm2(const rvec& v);

}  // namespace hsr
