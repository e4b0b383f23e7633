#include <gtest/gtest.h>

#include <set>

#include "brailleband/braille.hpp"
#include "brailleband/error.hpp"
#include "support/oracles.hpp"

namespace brailleband {
namespace {

std::string dots_of(BrailleCell c) {
  std::string s;
  for (int d : c.dots()) s.push_back(static_cast<char>('0' + d));
  return s;
}

TEST(BrailleCell, RejectsDotsOutsideTheCell) {
  EXPECT_THROW((BrailleCell{0}), Error);
  EXPECT_THROW((BrailleCell{7}), Error);
  EXPECT_THROW(BrailleCell::from_mask(0x40), Error);
}

TEST(BrailleCell, CanonicalAscendingOrder) {
  const BrailleCell c{5, 1, 3};
  EXPECT_EQ(c.dots(), (std::vector<int>{1, 3, 5}));
  EXPECT_EQ(c, (BrailleCell{1, 3, 5}));
  EXPECT_EQ(c.to_string(), "1,3,5");
  EXPECT_EQ(c.dot_count(), 3);
  EXPECT_TRUE(BrailleCell{}.empty());
  EXPECT_EQ(BrailleCell{}.dot_count(), 0);
}

TEST(EncodeChar, ExamplesFromTheChart) {
  EXPECT_EQ(encode_char('a'), (BrailleCell{1}));
  EXPECT_EQ(encode_char('q'), (BrailleCell{1, 2, 3, 4, 5}));
  EXPECT_EQ(encode_char('w'), (BrailleCell{2, 4, 5, 6}));
}

TEST(EncodeChar, MatchesIndependentChart) {
  for (const auto& [c, dots] : oracle::braille_chart()) EXPECT_EQ(dots_of(encode_char(c)), dots) << c;
  for (char d = '0'; d <= '9'; ++d) EXPECT_EQ(dots_of(encode_char(d)), oracle::chart_dots(d)) << d;
}

TEST(EncodeChar, UppercaseIsNormalized) { EXPECT_EQ(encode_char('Q'), encode_char('q')); }

TEST(EncodeChar, RejectsEverythingElse) {
  for (char c : std::string(" .,!#?-")) {
    try {
      encode_char(c);
      FAIL() << "accepted '" << c << "'";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::UnsupportedCharacter);
    }
  }
}

TEST(EncodeChar, AnchorDotCounts) {
  EXPECT_EQ(encode_char('a').dot_count(), 1);
  EXPECT_EQ(encode_char('q').dot_count(), 5);
}

TEST(DecodeCell, Examples) {
  EXPECT_EQ(decode_cell(BrailleCell{1}, DecodeMode::Letter), 'a');
  EXPECT_EQ(decode_cell(BrailleCell{2, 4, 5}, DecodeMode::Digit), '0');
  try {
    decode_cell(BrailleCell{1, 2, 3, 4, 5, 6}, DecodeMode::Letter);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownCell);
  }
  // 'k' exists as a letter but not as a digit.
  EXPECT_THROW(decode_cell(BrailleCell{1, 3}, DecodeMode::Digit), Error);
}

TEST(DecodeCell, RoundTripsAllLettersAndDigits) {
  for (char c = 'a'; c <= 'z'; ++c) EXPECT_EQ(decode_cell(encode_char(c), DecodeMode::Letter), c);
  for (char c = '0'; c <= '9'; ++c) EXPECT_EQ(decode_cell(encode_char(c), DecodeMode::Digit), c);
}

TEST(CharacterMap, LettersAreInjective) {
  std::set<std::uint8_t> masks;
  for (char c = 'a'; c <= 'z'; ++c) masks.insert(encode_char(c).mask());
  EXPECT_EQ(masks.size(), 26U);
  EXPECT_EQ(CharacterMap::standard().number_indicator(), (BrailleCell{3, 4, 5, 6}));
}

TEST(EncodeText, Examples) {
  const std::vector<Token> cat{CellToken{{1, 4}, 'c'}, CellToken{{1}, 'a'}, CellToken{{2, 3, 4, 5}, 't'}};
  EXPECT_EQ(encode_text("cat"), cat);
  EXPECT_TRUE(encode_text("").empty());
  const std::vector<Token> mixed{CellToken{{1}, 'a'}, WordBreak{}, CellToken{{3, 4, 5, 6}, '#'},
                                 CellToken{{1}, '1'}, CellToken{{1, 2}, '2'}};
  EXPECT_EQ(encode_text("a 12"), mixed);
}

TEST(EncodeText, OneIndicatorPerDigitRun) {
  const auto tokens = encode_text("1a23 4");
  std::string glyphs;
  for (const auto& t : tokens) glyphs.push_back(std::holds_alternative<WordBreak>(t) ? ' ' : std::get<CellToken>(t).source);
  EXPECT_EQ(glyphs, "#1a#23 #4");
  EXPECT_EQ(glyphs, oracle::glyphs("1a23 4"));
}

TEST(EncodeText, SpacesAreNotCollapsed) {
  const auto tokens = encode_text("a   b");
  ASSERT_EQ(tokens.size(), 5U);
  EXPECT_EQ(std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return std::holds_alternative<WordBreak>(t); }),
            3);
  const auto trimmed = encode_text("ab cd");
  EXPECT_FALSE(std::holds_alternative<WordBreak>(trimmed.front()));
  EXPECT_FALSE(std::holds_alternative<WordBreak>(trimmed.back()));
}

TEST(EncodeText, StrictPolicyReportsPosition) {
  try {
    encode_text("ab,c");
    FAIL();
  } catch (const UnsupportedCharacterError& e) {
    EXPECT_EQ(e.position(), 2U);
    EXPECT_EQ(e.character(), ',');
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedCharacter);
  }
}

TEST(EncodeText, SkipPolicyDropsCharacters) {
  EXPECT_EQ(encode_text("c.a!t", UnsupportedPolicy::Skip), encode_text("cat"));
  EXPECT_EQ(encode_text("CAT"), encode_text("cat"));
}

TEST(TableDump, OneLinePerCharacter) {
  const auto dump = table_dump();
  EXPECT_NE(dump.find("a 1\n"), std::string::npos);
  EXPECT_NE(dump.find("q 1,2,3,4,5\n"), std::string::npos);
  EXPECT_NE(dump.find("0 2,4,5\n"), std::string::npos);
  EXPECT_EQ(std::count(dump.begin(), dump.end(), '\n'), 26 + 10 + 1);
}

}  // namespace
}  // namespace brailleband
