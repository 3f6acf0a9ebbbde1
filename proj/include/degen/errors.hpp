#pragma once

#include <stdexcept>
#include <string>

namespace degen {

/// Base for numerical failures. Invalid arguments use std::invalid_argument.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

struct InternalError : Error {
  using Error::Error;
  const char* kind() const noexcept override { return "InternalError"; }
};

struct NotControllable : Error {
  using Error::Error;
  const char* kind() const noexcept override { return "NotControllable"; }
};

struct DegenerateCoupling : Error {
  using Error::Error;
  const char* kind() const noexcept override { return "DegenerateCoupling"; }
};

struct MomentDegenerate : Error {
  using Error::Error;
  const char* kind() const noexcept override { return "MomentDegenerate"; }
};

struct PrecisionExhausted : Error {
  PrecisionExhausted(const std::string& what, int bits, int suggested, int stage_index = -1)
      : Error(what), precision_bits(bits), suggested_bits(suggested), stage(stage_index) {}
  const char* kind() const noexcept override { return "PrecisionExhausted"; }
  int precision_bits;
  int suggested_bits;
  int stage;
};

struct StageTooShort : Error {
  StageTooShort(const std::string& what, int stage_index) : Error(what), stage(stage_index) {}
  const char* kind() const noexcept override { return "StageTooShort"; }
  int stage;
};

struct NotContractive : Error {
  NotContractive(const std::string& what, double d, double r)
      : Error(what), delta(d), ratio(r) {}
  const char* kind() const noexcept override { return "NotContractive"; }
  double delta;
  double ratio;
};

}  // namespace degen
