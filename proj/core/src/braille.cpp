#include "brailleband/braille.hpp"

#include <bit>

#include <fmt/format.h>

#include "brailleband/error.hpp"

namespace brailleband {

BrailleCell::BrailleCell(std::initializer_list<int> dots) {
  for (int d : dots) {
    if (d < 1 || d > 6) {
      throw Error(ErrorCode::InvalidInput, fmt::format("braille dot {} outside 1..6", d));
    }
    mask_ |= static_cast<std::uint8_t>(1U << (d - 1));
  }
}

BrailleCell BrailleCell::from_mask(std::uint8_t mask) {
  if (mask & 0xC0U) {
    throw Error(ErrorCode::InvalidInput, fmt::format("cell mask 0x{:02X} has bits beyond dot 6", mask));
  }
  return BrailleCell(mask);
}

int BrailleCell::dot_count() const noexcept { return std::popcount(mask_); }

std::vector<int> BrailleCell::dots() const {
  std::vector<int> out;
  out.reserve(6);
  for (int d = 1; d <= 6; ++d) {
    if (has(d)) out.push_back(d);
  }
  return out;
}

std::string BrailleCell::to_string() const {
  return fmt::format("{}", fmt::join(dots(), ","));
}

CharacterMap::CharacterMap() : number_indicator_{3, 4, 5, 6} {
  letters_ = {{
      {1},          {1, 2},          {1, 4},          {1, 4, 5},       {1, 5},
      {1, 2, 4},    {1, 2, 4, 5},    {1, 2, 5},       {2, 4},          {2, 4, 5},
      {1, 3},       {1, 2, 3},       {1, 3, 4},       {1, 3, 4, 5},    {1, 3, 5},
      {1, 2, 3, 4}, {1, 2, 3, 4, 5}, {1, 2, 3, 5},    {2, 3, 4},       {2, 3, 4, 5},
      {1, 3, 6},    {1, 2, 3, 6},    {2, 4, 5, 6},    {1, 3, 4, 6},    {1, 3, 4, 5, 6},
      {1, 3, 5, 6},
  }};
}

const CharacterMap& CharacterMap::standard() {
  static const CharacterMap map;
  return map;
}

BrailleCell CharacterMap::letter(char c) const {
  if (c < 'a' || c > 'z') throw Error(ErrorCode::UnsupportedCharacter, fmt::format("'{}' is not a letter", c));
  return letters_[static_cast<std::size_t>(c - 'a')];
}

BrailleCell CharacterMap::digit(char c) const {
  if (c < '0' || c > '9') throw Error(ErrorCode::UnsupportedCharacter, fmt::format("'{}' is not a digit", c));
  // 1..9 pair with a..i, 0 pairs with j.
  const int index = c == '0' ? 9 : c - '1';
  return letters_[static_cast<std::size_t>(index)];
}

char normalize(char c) noexcept {
  if (c >= 'A' && c <= 'Z') return static_cast<char>(c - 'A' + 'a');
  return c;
}

BrailleCell encode_char(char c) {
  const char n = normalize(c);
  const auto& map = CharacterMap::standard();
  if (n >= 'a' && n <= 'z') return map.letter(n);
  if (n >= '0' && n <= '9') return map.digit(n);
  throw UnsupportedCharacterError(c, 0);
}

char decode_cell(BrailleCell cell, DecodeMode mode) {
  const auto& map = CharacterMap::standard();
  const char last = mode == DecodeMode::Letter ? 'z' : 'j';
  for (char c = 'a'; c <= last; ++c) {
    if (map.letter(c) != cell) continue;
    if (mode == DecodeMode::Letter) return c;
    return c == 'j' ? '0' : static_cast<char>('1' + (c - 'a'));
  }
  throw Error(ErrorCode::UnknownCell,
              fmt::format("no {} for cell {{{}}}", mode == DecodeMode::Letter ? "letter" : "digit",
                          cell.to_string()));
}

std::vector<Token> encode_text(std::string_view text, UnsupportedPolicy policy) {
  const auto& map = CharacterMap::standard();
  std::vector<Token> out;
  out.reserve(text.size() + 2);
  bool in_digits = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = normalize(text[i]);
    if (c == ' ') {
      out.emplace_back(WordBreak{});
      in_digits = false;
    } else if (c >= 'a' && c <= 'z') {
      out.emplace_back(CellToken{map.letter(c), c});
      in_digits = false;
    } else if (c >= '0' && c <= '9') {
      if (!in_digits) out.emplace_back(CellToken{map.number_indicator(), kNumberIndicatorGlyph});
      out.emplace_back(CellToken{map.digit(c), c});
      in_digits = true;
    } else if (policy == UnsupportedPolicy::Strict) {
      throw UnsupportedCharacterError(text[i], i);
    }
    // Skip policy: drop the character. A digit run interrupted only by a
    // dropped character continues without a second indicator.
  }
  return out;
}

std::string table_dump() {
  const auto& map = CharacterMap::standard();
  std::string out;
  for (char c = 'a'; c <= 'z'; ++c) out += fmt::format("{} {}\n", c, map.letter(c).to_string());
  for (char c = '0'; c <= '9'; ++c) out += fmt::format("{} {}\n", c, map.digit(c).to_string());
  out += fmt::format("{} {}\n", kNumberIndicatorGlyph, map.number_indicator().to_string());
  return out;
}

}  // namespace brailleband
