#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace brailleband {

enum class ErrorCode {
  UnsupportedCharacter,
  UnknownCell,
  EmptyCell,
  InvalidConfig,
  MalformedCommandStream,
  DegenerateData,
  UnknownReference,
  EmptyRatings,
  InvalidInput,
  InsufficientData,
  SessionClosed,
  UnknownSession,
  UnknownRecord,
  LengthMismatch,
  AlreadyScored,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by encode_text in strict mode; carries the offending input offset.
class UnsupportedCharacterError : public Error {
 public:
  UnsupportedCharacterError(char c, std::size_t position);

  char character() const noexcept { return character_; }
  std::size_t position() const noexcept { return position_; }

 private:
  char character_;
  std::size_t position_;
};

}  // namespace brailleband
