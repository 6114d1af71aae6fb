#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ils {

enum class ErrorCode {
  duplicate_id,
  empty_label,
  bad_label,
  invalid_id,
  bad_weight,
  bad_decay,
  self_loop,
  self_pair,
  duplicate_link,
  dangling_endpoint,
  unknown_concept,
  no_aku,
  no_sku,
  disconnected,
  too_few_nodes,
  budget_exceeded,
  oracle_mismatch,
  parse_error,
  io_error,
  usage_error,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::duplicate_id: return "DuplicateId";
    case ErrorCode::empty_label: return "EmptyLabel";
    case ErrorCode::bad_label: return "BadLabel";
    case ErrorCode::invalid_id: return "InvalidId";
    case ErrorCode::bad_weight: return "BadWeight";
    case ErrorCode::bad_decay: return "BadDecay";
    case ErrorCode::self_loop: return "SelfLoop";
    case ErrorCode::self_pair: return "SelfPair";
    case ErrorCode::duplicate_link: return "DuplicateLink";
    case ErrorCode::dangling_endpoint: return "DanglingEndpoint";
    case ErrorCode::unknown_concept: return "UnknownConcept";
    case ErrorCode::no_aku: return "NoAku";
    case ErrorCode::no_sku: return "NoSku";
    case ErrorCode::disconnected: return "Disconnected";
    case ErrorCode::too_few_nodes: return "TooFewNodes";
    case ErrorCode::budget_exceeded: return "BudgetExceeded";
    case ErrorCode::oracle_mismatch: return "OracleMismatch";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::io_error: return "IoError";
    case ErrorCode::usage_error: return "UsageError";
  }
  return "UnknownError";
}

/// Single exception type for the whole library. `code()` identifies the
/// failed contract; parse errors additionally carry a 1-based line number.
class IlsError : public std::runtime_error {
 public:
  IlsError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code), message_(message) {}

  static IlsError parse(std::size_t line, const std::string& reason) {
    IlsError err(ErrorCode::parse_error,
                 "line " + std::to_string(line) + ": " + reason);
    err.line_ = line;
    return err;
  }

  ErrorCode code() const noexcept { return code_; }

  /// Message without the code prefix that what() carries.
  const std::string& message() const noexcept { return message_; }

  /// 1-based source line for parse errors, 0 otherwise.
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::string message_;
  std::size_t line_ = 0;
};

}  // namespace ils
