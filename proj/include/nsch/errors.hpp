#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nsch {

/// Density reached rho_min somewhere on the collocation grid.
class PositivityLoss : public std::runtime_error {
 public:
  PositivityLoss(double min_rho, double t)
      : std::runtime_error("positivity loss: min rho = " + std::to_string(min_rho) +
                           " at t = " + std::to_string(t)),
        min_rho_(min_rho),
        t_(t) {}
  double min_rho() const { return min_rho_; }
  double time() const { return t_; }

 private:
  double min_rho_;
  double t_;
};

/// The mass-matrix solve for u given Pi_m(rho u) did not converge.
class GramFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The time step exceeds the stability heuristic.
class CflViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : std::runtime_error(join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& p) {
    std::string s;
    for (const auto& x : p) s += x + "\n";
    return s;
  }
  std::vector<std::string> problems_;
};

/// Every path of an ensemble failed.
class EnsembleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nsch
