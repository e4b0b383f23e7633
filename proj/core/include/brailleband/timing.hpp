#pragma once

#include <chrono>
#include <span>
#include <string>
#include <vector>

#include "brailleband/braille.hpp"

namespace brailleband {

using Millis = std::chrono::milliseconds;

/// Pulse and gap durations for haptic actuation. One dot cycle is
/// dot_on + dot_off; the off period also follows the last dot of a character.
struct TimingConfig {
  Millis dot_on{300};
  Millis dot_off{300};
  Millis char_gap{1000};
  Millis word_gap{2000};

  /// Default pulse timing with word_gap = 2 * char_gap.
  static TimingConfig with_gap(Millis char_gap);

  Millis dot_cycle() const noexcept { return dot_on + dot_off; }
  /// Throws InvalidConfig unless dot_on, dot_off > 0, char_gap >= 0 and
  /// word_gap >= char_gap.
  void validate() const;

  friend bool operator==(const TimingConfig&, const TimingConfig&) = default;
};

struct VibrationEvent {
  int node;  // braille dot 1..6
  Millis start;
  Millis duration;

  friend bool operator==(const VibrationEvent&, const VibrationEvent&) = default;
};

struct CharBoundary {
  char character;  // source glyph; ' ' for silence not attached to a character
  Millis start;
  Millis end;

  friend bool operator==(const CharBoundary&, const CharBoundary&) = default;
};

struct Schedule {
  std::vector<VibrationEvent> events;
  std::vector<CharBoundary> char_boundaries;
  Millis total_duration{0};

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

/// Serial actuation of one cell: dot at sorted position p starts at
/// origin + p * dot_cycle. The character ends at origin + d * dot_cycle + char_gap.
Schedule schedule_char(BrailleCell cell, const TimingConfig& cfg, Millis origin = Millis{0},
                       char source = '?');

/// Concatenates characters from time 0. A WordBreak directly after a character
/// replaces that character's char_gap with word_gap; any other WordBreak
/// (leading, or repeated) adds a further word_gap of silence.
Schedule schedule_text(std::span<const Token> tokens, const TimingConfig& cfg);

/// Characters per second for a d-dot character with the given gap in seconds,
/// using the default 0.6 s dot cycle.
double ctr_char(int dot_count, double char_gap_s);

/// Same as ctr_char, with an explicit dot cycle in seconds.
double ctr_char(int dot_count, double char_gap_s, double dot_cycle_s);

/// Midpoint of the best case ('a', one dot) and worst case ('q', five dots).
double ctr_average(double char_gap_s);

struct CtrSummary {
  double maximum;
  double minimum;
  double average;
};

CtrSummary ctr_summary(double char_gap_s);

std::string schedule_to_text(const Schedule& schedule);
std::string schedule_to_json(const Schedule& schedule, int indent = -1);

}  // namespace brailleband
