#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tgm {

enum class ErrorCode {
  MissingHeader,
  UnknownChannel,
  BadField,
  InvalidRange,
  InvalidConfig,
  UnknownNode,
  NotAPerson,
  NonPositiveBinWidth,
  NoVisibleEdges,
  KindMismatch,
  NotInjective,
  EmptyMapping,
  AlreadyMatched,
  TargetTaken,
  UnknownPair,
  PairRejected,
  IncompatibleRegistry,
  NotFound,
  Conflict,
  BadRequest,
  PayloadTooLarge,
  Io,
};

std::string_view to_string(ErrorCode code);

// All engine failures surface as tgm::Error; the code drives CLI exit codes
// and HTTP status mapping.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tgm
