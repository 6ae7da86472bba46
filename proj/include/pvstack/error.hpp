#pragma once

#include <stdexcept>
#include <string>

namespace pvstack {

enum class Errc {
  // configuration / usage
  InvalidArgument,
  ConfigError,
  ZeroCapacity,
  // data
  MalformedRow,
  GapInSeries,
  UnknownZone,
  OutOfRangePower,
  EmptyIntersection,
  RangeNotCovered,
  EmptyDataset,
  FeatureMismatch,
  UnknownFeature,
  AlreadyNormalized,
  IncompleteDay,
  LengthMismatch,
  MissingArtifact,
  SchemaMismatch,
  MemberMismatch,
  KTooLarge,
  TooFewSamples,
  // numerics
  AllZeroWeights,
  NoConvergence,
  DegenerateKernel,
  SingularHessian,
  NonFinite,
};

constexpr const char* errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ConfigError: return "ConfigError";
    case Errc::ZeroCapacity: return "ZeroCapacity";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::GapInSeries: return "GapInSeries";
    case Errc::UnknownZone: return "UnknownZone";
    case Errc::OutOfRangePower: return "OutOfRangePower";
    case Errc::EmptyIntersection: return "EmptyIntersection";
    case Errc::RangeNotCovered: return "RangeNotCovered";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::FeatureMismatch: return "FeatureMismatch";
    case Errc::UnknownFeature: return "UnknownFeature";
    case Errc::AlreadyNormalized: return "AlreadyNormalized";
    case Errc::IncompleteDay: return "IncompleteDay";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::MissingArtifact: return "MissingArtifact";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::MemberMismatch: return "MemberMismatch";
    case Errc::KTooLarge: return "KTooLarge";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::AllZeroWeights: return "AllZeroWeights";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::DegenerateKernel: return "DegenerateKernel";
    case Errc::SingularHessian: return "SingularHessian";
    case Errc::NonFinite: return "NonFinite";
  }
  return "Error";
}

/// Process exit code the CLI uses for an error of this kind:
/// 2 = config error, 3 = data error, 4 = numerical failure.
constexpr int errc_exit_code(Errc c) noexcept {
  switch (c) {
    case Errc::InvalidArgument:
    case Errc::ConfigError:
    case Errc::ZeroCapacity: return 2;
    case Errc::AllZeroWeights:
    case Errc::NoConvergence:
    case Errc::DegenerateKernel:
    case Errc::SingularHessian:
    case Errc::NonFinite: return 4;
    default: return 3;
  }
}

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

} // namespace pvstack
