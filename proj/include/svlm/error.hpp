#pragma once

#include <stdexcept>
#include <string>

namespace svlm {

/// Error categories used across the library. Each maps to one failure mode
/// of a public operation; the CLI translates them into exit codes.
enum class errc {
  non_positive_weight,
  asymmetric_covariance,
  not_psd,
  cauchy_schwarz_violation,
  exponent_out_of_range,
  mixed_regime,
  domain_error,
  horizon_overflow,
  degenerate_normalizer,
  time_out_of_range,
  already_normalized,
  factorization_failure,
  underpowered_run,
  config_error,
  io_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::non_positive_weight: return "NonPositiveWeight";
    case errc::asymmetric_covariance: return "AsymmetricCovariance";
    case errc::not_psd: return "NotPSD";
    case errc::cauchy_schwarz_violation: return "CauchySchwarzViolation";
    case errc::exponent_out_of_range: return "ExponentOutOfRange";
    case errc::mixed_regime: return "MixedRegime";
    case errc::domain_error: return "DomainError";
    case errc::horizon_overflow: return "HorizonOverflow";
    case errc::degenerate_normalizer: return "DegenerateNormalizer";
    case errc::time_out_of_range: return "TimeOutOfRange";
    case errc::already_normalized: return "AlreadyNormalized";
    case errc::factorization_failure: return "FactorizationFailure";
    case errc::underpowered_run: return "UnderpoweredRun";
    case errc::config_error: return "ConfigError";
    case errc::io_error: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace svlm
