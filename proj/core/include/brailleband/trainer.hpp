#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "brailleband/emulator.hpp"
#include "brailleband/stats.hpp"

namespace brailleband {

struct TrialConfig {
  int word_length = 3;
  int words_per_block = 10;
  std::vector<int> gap_schedule{2000, 1500, 1200, 1000, 800, 500, 400};
  int familiarization_minutes = 15;  // informational only

  /// Throws InvalidConfig for non-positive or repeated gaps, or a word length
  /// the corpus cannot serve.
  void validate() const;

  friend bool operator==(const TrialConfig&, const TrialConfig&) = default;
};

/// Common lowercase words of three and four letters.
std::span<const std::string_view> word_corpus();

/// Deterministic for a given seed.
std::vector<std::string> pick_words(const TrialConfig& config, std::uint64_t seed);

struct Guess {
  std::string text;
  std::vector<bool> correct;  // positional
  std::int64_t at_ms = 0;

  friend bool operator==(const Guess&, const Guess&) = default;
};

struct WordRecord {
  int id = 0;
  std::string word;
  MotorTimeline timeline;
  std::int64_t transmitted_at_ms = 0;
  std::optional<Guess> guess;

  int pulse_count() const noexcept;

  friend bool operator==(const WordRecord&, const WordRecord&) = default;
};

enum class SessionStatus { Active, Closed };

struct Session {
  std::string id;
  std::string subject;
  int char_gap_ms = 0;
  TrialConfig config;
  std::uint64_t seed = 0;
  std::vector<std::string> words;  // planned block
  std::vector<WordRecord> records;
  std::optional<double> rating;
  SessionStatus status = SessionStatus::Active;

  int correct_chars() const noexcept;
  int scored_chars() const noexcept;
  /// Correct characters over scored characters, in percent; empty until a
  /// guess has been scored.
  std::optional<double> accuracy() const noexcept;
  /// First planned word that has not been transmitted yet.
  std::optional<std::string> next_word() const;

  friend bool operator==(const Session&, const Session&) = default;
};

struct SessionRequest {
  std::string subject;
  int char_gap_ms = 1000;
  TrialConfig config;
  std::optional<std::uint64_t> seed;
};

/// The same pulse timeline the trainer stores for a word sent at this gap.
MotorTimeline transmit_timeline(const std::string& word, int char_gap_ms);

struct ReportOptions {
  std::optional<std::vector<int>> gaps;  // restrict to these treatments
  std::optional<int> reference_gap;      // defaults to the best treatment
  PairwiseOptions pairwise;
};

struct SessionReport {
  std::vector<SampleSummary> summaries;  // by descending gap
  std::optional<AnovaResult> anova;      // needs >= 2 gaps with >= 2 sessions each
  std::optional<int> reference_gap;
  std::vector<PairwiseResult> pairwise;
  std::optional<double> usability_mean;
  std::string note;
};

/// Per-gap summaries of session accuracies, then ANOVA and pairwise
/// comparisons when there is enough data. Sessions without any scored guess
/// are ignored. Throws InsufficientData when nothing is left.
SessionReport session_report(std::span<const Session> sessions, const ReportOptions& options = {});

std::string format_report(const SessionReport& report);

/// Append-only session persistence: one JSON-lines file per session. With no
/// directory the store keeps nothing on disk.
class SessionStore {
 public:
  SessionStore() = default;
  explicit SessionStore(std::filesystem::path dir);

  bool persistent() const noexcept { return dir_.has_value(); }
  void append(const std::string& session_id, const nlohmann::json& event) const;
  /// Every session found in the directory, rebuilt by replaying its events.
  std::vector<Session> load_all() const;

 private:
  std::optional<std::filesystem::path> dir_;
};

/// Rebuilds a session from its event lines.
Session replay_session(std::span<const nlohmann::json> events);

class TrainerService {
 public:
  using WallClock = std::function<std::int64_t()>;

  explicit TrainerService(SessionStore store = {}, WallClock clock = {});

  Session start_session(const SessionRequest& request);
  /// Sends `word`, or the next planned word when absent, through host, band
  /// link and emulator. Throws SessionClosed, UnsupportedCharacter.
  WordRecord transmit_word(const std::string& session_id, std::optional<std::string> word = std::nullopt);
  /// Throws UnknownRecord, LengthMismatch, AlreadyScored, SessionClosed.
  WordRecord record_guess(const std::string& session_id, int record_id, const std::string& guess);
  /// Stores the 0..10 usability rating and closes the session.
  Session submit_rating(const std::string& session_id, double rating);
  Session close_session(const std::string& session_id);

  MotorTimeline timeline(const std::string& session_id, int record_id) const;
  Session session(const std::string& session_id) const;
  std::vector<Session> sessions() const;
  SessionReport report(const ReportOptions& options = {}) const;

 private:
  struct Slot {
    mutable std::mutex mutex;
    Session session;
  };

  std::shared_ptr<Slot> slot(const std::string& session_id) const;

  SessionStore store_;
  WallClock clock_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
  int next_id_ = 1;
};

void to_json(nlohmann::json& j, const TrialConfig& c);
void from_json(const nlohmann::json& j, TrialConfig& c);
void to_json(nlohmann::json& j, const WordRecord& r);
void to_json(nlohmann::json& j, const Session& s);
void to_json(nlohmann::json& j, const SessionReport& r);

}  // namespace brailleband
