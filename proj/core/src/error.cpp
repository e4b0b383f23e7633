#include "brailleband/error.hpp"

#include <fmt/format.h>

namespace brailleband {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnsupportedCharacter: return "UnsupportedCharacter";
    case ErrorCode::UnknownCell: return "UnknownCell";
    case ErrorCode::EmptyCell: return "EmptyCell";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::MalformedCommandStream: return "MalformedCommandStream";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::UnknownReference: return "UnknownReference";
    case ErrorCode::EmptyRatings: return "EmptyRatings";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::SessionClosed: return "SessionClosed";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::UnknownRecord: return "UnknownRecord";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::AlreadyScored: return "AlreadyScored";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string describe(char c) {
  auto u = static_cast<unsigned char>(c);
  if (u >= 0x20 && u < 0x7F) return fmt::format("'{}'", c);
  return fmt::format("0x{:02X}", u);
}

}  // namespace

UnsupportedCharacterError::UnsupportedCharacterError(char c, std::size_t position)
    : Error(ErrorCode::UnsupportedCharacter,
            fmt::format("unsupported character {} at position {}", describe(c), position)),
      character_(c),
      position_(position) {}

}  // namespace brailleband
