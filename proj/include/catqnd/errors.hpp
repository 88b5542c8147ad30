#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace catqnd {

// Base of every error raised by the library. The CLI maps subclasses onto
// exit codes, so keep the hierarchy flat.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class domain_error : public error {
public:
  using error::error;
};

// Grid spacing too coarse for the requested representation.
class resolution_error : public error {
public:
  using error::error;
};

// All-zero state or a wavefunction with nothing to measure.
class degenerate_state_error : public error {
public:
  using error::error;
};

class capacity_error : public error {
public:
  capacity_error(const std::string& what, std::size_t required)
      : error(what), required_(required) {}
  std::size_t required() const noexcept { return required_; }

private:
  std::size_t required_;
};

// Measurement outcome with (numerically) zero probability for the given state.
class improbable_outcome_error : public error {
public:
  improbable_outcome_error(const std::string& what, double weight)
      : error(what), weight_(weight) {}
  // Squared norm of the conditional state before normalization.
  double weight() const noexcept { return weight_; }

private:
  double weight_;
};

class no_cat_error : public error {
public:
  using error::error;
};

class no_fringe_error : public error {
public:
  using error::error;
};

}  // namespace catqnd
