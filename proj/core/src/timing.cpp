#include "brailleband/timing.hpp"

#include <fmt/format.h>

#include "brailleband/error.hpp"
#include "brailleband/json_io.hpp"

namespace brailleband {

namespace {

constexpr double kDefaultDotCycleSeconds = 0.6;
constexpr int kBestCaseDots = 1;   // 'a'
constexpr int kWorstCaseDots = 5;  // 'q'

}  // namespace

TimingConfig TimingConfig::with_gap(Millis char_gap) {
  TimingConfig cfg;
  cfg.char_gap = char_gap;
  cfg.word_gap = 2 * char_gap;
  return cfg;
}

void TimingConfig::validate() const {
  if (dot_on <= Millis{0} || dot_off <= Millis{0}) {
    throw Error(ErrorCode::InvalidConfig,
                fmt::format("dot_on ({} ms) and dot_off ({} ms) must be positive", dot_on.count(),
                            dot_off.count()));
  }
  if (char_gap < Millis{0}) {
    throw Error(ErrorCode::InvalidConfig, fmt::format("char_gap {} ms is negative", char_gap.count()));
  }
  if (word_gap < char_gap) {
    throw Error(ErrorCode::InvalidConfig,
                fmt::format("word_gap {} ms is shorter than char_gap {} ms", word_gap.count(),
                            char_gap.count()));
  }
}

Schedule schedule_char(BrailleCell cell, const TimingConfig& cfg, Millis origin, char source) {
  cfg.validate();
  if (cell.empty()) throw Error(ErrorCode::EmptyCell, "cannot schedule the blank cell");

  Schedule out;
  const auto dots = cell.dots();
  out.events.reserve(dots.size());
  Millis t = origin;
  for (int dot : dots) {
    out.events.push_back({dot, t, cfg.dot_on});
    t += cfg.dot_cycle();
  }
  const Millis end = t + cfg.char_gap;
  out.char_boundaries.push_back({source, origin, end});
  out.total_duration = end;
  return out;
}

Schedule schedule_text(std::span<const Token> tokens, const TimingConfig& cfg) {
  cfg.validate();
  Schedule out;
  Millis cursor{0};
  bool after_char = false;
  for (const Token& token : tokens) {
    if (const auto* ct = std::get_if<CellToken>(&token)) {
      auto one = schedule_char(ct->cell, cfg, cursor, ct->source);
      out.events.insert(out.events.end(), one.events.begin(), one.events.end());
      out.char_boundaries.push_back(one.char_boundaries.front());
      cursor = one.total_duration;
      after_char = true;
    } else if (after_char) {
      auto& last = out.char_boundaries.back();
      last.end += cfg.word_gap - cfg.char_gap;
      cursor = last.end;
      after_char = false;
    } else {
      out.char_boundaries.push_back({' ', cursor, cursor + cfg.word_gap});
      cursor += cfg.word_gap;
    }
  }
  out.total_duration = cursor;
  return out;
}

double ctr_char(int dot_count, double char_gap_s, double dot_cycle_s) {
  if (dot_count < 1 || dot_count > 6) {
    throw Error(ErrorCode::InvalidInput, fmt::format("dot count {} outside 1..6", dot_count));
  }
  if (!(char_gap_s >= 0.0) || !(dot_cycle_s > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "character gap must be >= 0 and dot cycle > 0");
  }
  return 1.0 / (dot_cycle_s * dot_count + char_gap_s);
}

double ctr_char(int dot_count, double char_gap_s) {
  return ctr_char(dot_count, char_gap_s, kDefaultDotCycleSeconds);
}

double ctr_average(double char_gap_s) {
  return (ctr_char(kBestCaseDots, char_gap_s) + ctr_char(kWorstCaseDots, char_gap_s)) / 2.0;
}

CtrSummary ctr_summary(double char_gap_s) {
  return {ctr_char(kBestCaseDots, char_gap_s), ctr_char(kWorstCaseDots, char_gap_s),
          ctr_average(char_gap_s)};
}

std::string schedule_to_text(const Schedule& schedule) {
  std::string out;
  for (const auto& e : schedule.events) {
    out += fmt::format("node {} start {} duration {}\n", e.node, e.start.count(), e.duration.count());
  }
  out += fmt::format("total {}\n", schedule.total_duration.count());
  return out;
}

std::string schedule_to_json(const Schedule& schedule, int indent) {
  return nlohmann::json(schedule).dump(indent);
}

void to_json(nlohmann::json& j, const VibrationEvent& e) {
  j = nlohmann::json{{"node", e.node}, {"start_ms", e.start.count()}, {"duration_ms", e.duration.count()}};
}

void to_json(nlohmann::json& j, const Schedule& s) {
  nlohmann::json chars = nlohmann::json::array();
  for (const auto& b : s.char_boundaries) {
    chars.push_back({{"char", std::string(1, b.character)}, {"start_ms", b.start.count()}, {"end_ms", b.end.count()}});
  }
  j = nlohmann::json{{"events", s.events}, {"characters", chars}, {"total_ms", s.total_duration.count()}};
}

}  // namespace brailleband
