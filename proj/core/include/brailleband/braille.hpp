#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace brailleband {

/// A six-dot braille cell. Dots 1-2-3 run down the left column, 4-5-6 down
/// the right. Stored as a bit mask (bit k-1 set when dot k is raised), so the
/// dot order is always ascending.
class BrailleCell {
 public:
  constexpr BrailleCell() = default;
  /// Throws InvalidInput if any dot lies outside 1..6.
  BrailleCell(std::initializer_list<int> dots);

  static BrailleCell from_mask(std::uint8_t mask);

  constexpr std::uint8_t mask() const noexcept { return mask_; }
  constexpr bool empty() const noexcept { return mask_ == 0; }
  constexpr bool has(int dot) const noexcept {
    return dot >= 1 && dot <= 6 && (mask_ >> (dot - 1)) & 1U;
  }
  int dot_count() const noexcept;
  /// Raised dots in ascending order.
  std::vector<int> dots() const;
  /// "1,2,5" style rendering; empty string for the blank cell.
  std::string to_string() const;

  friend constexpr bool operator==(BrailleCell, BrailleCell) = default;

 private:
  constexpr explicit BrailleCell(std::uint8_t mask) : mask_(mask) {}
  std::uint8_t mask_ = 0;
};

enum class DecodeMode { Letter, Digit };

struct CellToken {
  BrailleCell cell;
  // Source glyph: a letter, a digit, or '#' for the number indicator.
  char source;

  friend bool operator==(const CellToken&, const CellToken&) = default;
};

struct WordBreak {
  friend bool operator==(WordBreak, WordBreak) = default;
};

using Token = std::variant<CellToken, WordBreak>;

enum class UnsupportedPolicy { Strict, Skip };

inline constexpr char kNumberIndicatorGlyph = '#';

class CharacterMap {
 public:
  /// The grade-1 table: a-z plus digits sharing the a-j patterns.
  static const CharacterMap& standard();

  BrailleCell letter(char c) const;
  BrailleCell digit(char c) const;
  BrailleCell number_indicator() const noexcept { return number_indicator_; }

 private:
  CharacterMap();
  std::array<BrailleCell, 26> letters_{};
  BrailleCell number_indicator_;
};

/// Lowercases ASCII letters; everything else passes through unchanged.
char normalize(char c) noexcept;

/// Cell for a letter or digit. Digits return the cell of their paired letter
/// (1..9 -> a..i, 0 -> j) without the number indicator.
BrailleCell encode_char(char c);

/// Inverse of encode_char under the given mode. Throws UnknownCell.
char decode_cell(BrailleCell cell, DecodeMode mode);

/// Spaces become WordBreak tokens (one per space); each maximal digit run is
/// prefixed by a single number indicator cell.
std::vector<Token> encode_text(std::string_view text,
                               UnsupportedPolicy policy = UnsupportedPolicy::Strict);

/// One line per character, e.g. "a 1" and "q 1,2,3,4,5".
std::string table_dump();

}  // namespace brailleband
