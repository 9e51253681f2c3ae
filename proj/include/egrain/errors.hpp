#pragma once

#include <stdexcept>
#include <string>

namespace egrain {

/// Quadrature or series evaluation failed to reach the requested tolerance.
/// Carries the achieved residual estimate.
class numeric_error : public std::runtime_error {
 public:
  numeric_error(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// A sampled grid is too coarse (or too short) for the requested transform.
/// Carries the largest |p| the grid can represent faithfully.
class resolution_error : public std::runtime_error {
 public:
  resolution_error(const std::string& what, double max_faithful_momentum)
      : std::runtime_error(what),
        max_faithful_momentum_(max_faithful_momentum) {}
  double max_faithful_momentum() const { return max_faithful_momentum_; }

 private:
  double max_faithful_momentum_;
};

/// A full-line binning could not push the uncovered mass below the truncation
/// threshold within the bin-index cap. Carries the tail that was achieved.
class truncation_error : public std::runtime_error {
 public:
  truncation_error(const std::string& what, double achieved_tail)
      : std::runtime_error(what), achieved_tail_(achieved_tail) {}
  double achieved_tail() const { return achieved_tail_; }

 private:
  double achieved_tail_;
};

/// Degenerate statistics: vanishing mass or zero variance where a positive
/// value is required.
class degenerate_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace egrain
