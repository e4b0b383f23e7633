#include "brailleband/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <random>
#include <set>

#include <fmt/format.h>

#include "brailleband/error.hpp"
#include "brailleband/json_io.hpp"

namespace brailleband {

namespace {

constexpr std::string_view kCorpus[] = {
    "ace", "act", "add", "age", "ago", "aid", "aim", "air", "all", "and", "ant", "any", "ape", "arc", "arm",
    "art", "ask", "ate", "bad", "bag", "ban", "bat", "bed", "bee", "big", "bin", "bit", "box", "boy", "bud",
    "bug", "bus", "but", "buy", "cab", "can", "cap", "car", "cat", "cow", "cry", "cup", "cut", "dad", "day",
    "den", "dew", "did", "dig", "dim", "dog", "dot", "dry", "due", "dug", "ear", "eat", "egg", "elf", "end",
    "eye", "fan", "far", "fat", "fed", "few", "fig", "fin", "fit", "fix", "fly", "fog", "for", "fox", "fun",
    "fur", "gap", "gas", "get", "gum", "gun", "guy", "had", "ham", "has", "hat", "hen", "her", "hid", "him",
    "hip", "his", "hit", "hop", "hot", "how", "hug", "hut", "ice", "ill", "ink", "jam", "jar", "jaw", "jet",
    "job", "jog", "joy", "key", "kid", "kit", "lab", "lap", "law", "lay", "leg", "let", "lid", "lip", "log",
    "lot", "low", "mad", "man", "map", "mat", "men", "mix", "mob", "mom", "mud", "mug", "nap", "net", "new",
    "nod", "not", "now", "nut", "oak", "odd", "off", "oil", "old", "one", "our", "out", "owl", "own", "pad",
    "pan", "pen", "pet", "pie", "pig", "pin", "pit", "pot", "put", "quiz", "rag", "ram", "ran", "rat", "raw",
    "red", "rib", "rid", "rim", "rip", "rod", "row", "rub", "rug", "run", "sad", "sat", "saw", "say", "sea",
    "see", "set", "sew", "she", "shy", "sip", "sit", "six", "sky", "sly", "sob", "son", "sun", "tab", "tag",
    "tan", "tap", "tax", "tea", "ten", "the", "tie", "tin", "tip", "toe", "top", "toy", "try", "tub", "two",
    "use", "van", "vet", "wag", "war", "was", "wax", "way", "web", "wet", "who", "why", "wig", "win", "wit",
    "yak", "yes", "yet", "you", "zip", "zoo", "able", "back", "band", "bell", "bird", "blue", "boat", "book",
    "cake", "city", "coat", "cold", "dark", "desk", "door", "duck", "face", "farm", "fish", "frog", "gift",
    "girl", "gold", "hand", "home", "jump", "kite", "lamp", "milk", "moon", "nest", "park", "quit", "rain",
    "road", "rose", "ship", "shoe", "snow", "star", "tree", "wind", "wolf", "yard", "zero",
};

std::int64_t system_now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string lowercase(std::string s) {
  for (auto& c : s) c = normalize(c);
  return s;
}

WordRecord& find_record(Session& s, int record_id) {
  auto it = std::find_if(s.records.begin(), s.records.end(), [&](const WordRecord& r) { return r.id == record_id; });
  if (it == s.records.end()) {
    throw Error(ErrorCode::UnknownRecord, fmt::format("session {} has no record {}", s.id, record_id));
  }
  return *it;
}

void require_active(const Session& s) {
  if (s.status == SessionStatus::Closed) throw Error(ErrorCode::SessionClosed, fmt::format("session {} is closed", s.id));
}

// Mutations shared by the live service and event replay.

WordRecord& apply_transmit(Session& s, std::string word, MotorTimeline timeline, std::int64_t at_ms) {
  require_active(s);
  WordRecord r;
  r.id = static_cast<int>(s.records.size()) + 1;
  r.word = std::move(word);
  r.timeline = std::move(timeline);
  r.transmitted_at_ms = at_ms;
  s.records.push_back(std::move(r));
  return s.records.back();
}

WordRecord& apply_guess(Session& s, int record_id, const std::string& raw_guess, std::int64_t at_ms) {
  require_active(s);
  auto& r = find_record(s, record_id);
  if (r.guess) throw Error(ErrorCode::AlreadyScored, fmt::format("record {} already has a guess", record_id));
  const std::string guess = lowercase(raw_guess);
  if (guess.size() != r.word.size()) {
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("guess has {} characters, word has {}", guess.size(), r.word.size()));
  }
  Guess g{guess, {}, at_ms};
  g.correct.reserve(guess.size());
  for (std::size_t i = 0; i < guess.size(); ++i) g.correct.push_back(guess[i] == r.word[i]);
  r.guess = std::move(g);
  return r;
}

void apply_rating(Session& s, double rating) {
  require_active(s);
  if (!(rating >= 0.0 && rating <= 10.0)) {
    throw Error(ErrorCode::InvalidInput, fmt::format("rating {} outside 0..10", rating));
  }
  s.rating = rating;
  s.status = SessionStatus::Closed;
}

nlohmann::json created_event(const Session& s) {
  return {{"event", "created"}, {"id", s.id},         {"subject", s.subject}, {"char_gap_ms", s.char_gap_ms},
          {"config", s.config}, {"seed", s.seed},     {"words", s.words}};
}

}  // namespace

void TrialConfig::validate() const {
  if (words_per_block < 1) throw Error(ErrorCode::InvalidConfig, "words_per_block must be positive");
  std::set<int> seen;
  for (int g : gap_schedule) {
    if (g <= 0) throw Error(ErrorCode::InvalidConfig, fmt::format("gap {} ms is not positive", g));
    if (!seen.insert(g).second) throw Error(ErrorCode::InvalidConfig, fmt::format("gap {} ms listed twice", g));
  }
  const auto corpus = word_corpus();
  if (std::none_of(corpus.begin(), corpus.end(),
                   [&](std::string_view w) { return static_cast<int>(w.size()) == word_length; })) {
    throw Error(ErrorCode::InvalidConfig, fmt::format("no corpus words of length {}", word_length));
  }
}

std::span<const std::string_view> word_corpus() { return kCorpus; }

std::vector<std::string> pick_words(const TrialConfig& config, std::uint64_t seed) {
  config.validate();
  std::vector<std::string_view> pool;
  for (auto w : word_corpus()) {
    if (static_cast<int>(w.size()) == config.word_length) pool.push_back(w);
  }
  // Raw engine output keeps the sequence identical across standard libraries.
  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(config.words_per_block));
  for (int i = 0; i < config.words_per_block; ++i) out.emplace_back(pool[rng() % pool.size()]);
  return out;
}

int WordRecord::pulse_count() const noexcept {
  int n = 0;
  for (const auto& node : timeline.nodes) n += static_cast<int>(node.size());
  return n;
}

int Session::correct_chars() const noexcept {
  int n = 0;
  for (const auto& r : records) {
    if (r.guess) n += static_cast<int>(std::count(r.guess->correct.begin(), r.guess->correct.end(), true));
  }
  return n;
}

int Session::scored_chars() const noexcept {
  int n = 0;
  for (const auto& r : records) {
    if (r.guess) n += static_cast<int>(r.guess->correct.size());
  }
  return n;
}

std::optional<double> Session::accuracy() const noexcept {
  const int total = scored_chars();
  if (total == 0) return std::nullopt;
  return 100.0 * correct_chars() / total;
}

std::optional<std::string> Session::next_word() const {
  if (records.size() < words.size()) return words[records.size()];
  return std::nullopt;
}

MotorTimeline transmit_timeline(const std::string& word, int char_gap_ms) {
  const auto trace = link_roundtrip(word, TimingConfig::with_gap(Millis{char_gap_ms}));
  return apply_commands(trace.commands, trace.end_of_transmission);
}

SessionReport session_report(std::span<const Session> sessions, const ReportOptions& options) {
  std::map<int, std::vector<double>, std::greater<>> by_gap;
  std::vector<double> ratings;
  for (const auto& s : sessions) {
    if (options.gaps && std::find(options.gaps->begin(), options.gaps->end(), s.char_gap_ms) == options.gaps->end()) {
      continue;
    }
    if (s.rating) ratings.push_back(*s.rating);
    if (auto acc = s.accuracy()) by_gap[s.char_gap_ms].push_back(*acc);
  }

  SessionReport report;
  std::vector<int> thin;
  for (const auto& [gap, values] : by_gap) {
    if (values.size() < 2) {
      thin.push_back(gap);
      continue;
    }
    report.summaries.push_back(summarize(gap, values));
  }
  if (report.summaries.empty()) {
    throw Error(ErrorCode::InsufficientData, "no gap has two or more scored sessions");
  }
  if (!ratings.empty()) report.usability_mean = usability_mean(ratings);
  if (!thin.empty()) report.note = fmt::format("skipped gaps with fewer than 2 sessions: {}", fmt::join(thin, ","));

  if (report.summaries.size() < 2) {
    if (!report.note.empty()) report.note += "; ";
    report.note += "ANOVA unavailable: only one gap";
    return report;
  }
  try {
    report.anova = anova_from_summary(report.summaries);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateData) throw;
    if (!report.note.empty()) report.note += "; ";
    report.note += "ANOVA unavailable: no within-gap variance";
    return report;
  }
  report.reference_gap = options.reference_gap.value_or(best_treatment(report.summaries));
  report.pairwise = pairwise_vs_reference(report.summaries, *report.reference_gap, options.pairwise);
  return report;
}

std::string format_report(const SessionReport& report) {
  std::string out = format_table_summaries(report.summaries);
  if (report.anova) out += "\n" + format_anova(*report.anova);
  if (!report.pairwise.empty()) out += "\n" + format_pairwise(report.pairwise);
  if (report.usability_mean) out += fmt::format("\nusability mean {:.2f}\n", *report.usability_mean);
  if (!report.note.empty()) out += fmt::format("\nnote: {}\n", report.note);
  return out;
}

SessionStore::SessionStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(*dir_, ec);
  if (ec) throw Error(ErrorCode::Io, fmt::format("cannot create {}: {}", dir_->string(), ec.message()));
}

void SessionStore::append(const std::string& session_id, const nlohmann::json& event) const {
  if (!dir_) return;
  const auto path = *dir_ / (session_id + ".jsonl");
  std::ofstream out(path, std::ios::app);
  out << event.dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot append to {}", path.string()));
}

std::vector<Session> SessionStore::load_all() const {
  std::vector<Session> out;
  if (!dir_) return out;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(*dir_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::ifstream in(path);
    std::vector<nlohmann::json> events;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        events.push_back(nlohmann::json::parse(line));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Io, fmt::format("{}: {}", path.string(), e.what()));
      }
    }
    out.push_back(replay_session(events));
  }
  return out;
}

Session replay_session(std::span<const nlohmann::json> events) {
  if (events.empty() || events.front().value("event", "") != "created") {
    throw Error(ErrorCode::Io, "session log must start with a 'created' event");
  }
  try {
    const auto& c = events.front();
    Session s;
    s.id = c.at("id").get<std::string>();
    s.subject = c.at("subject").get<std::string>();
    s.char_gap_ms = c.at("char_gap_ms").get<int>();
    s.config = c.at("config").get<TrialConfig>();
    s.seed = c.at("seed").get<std::uint64_t>();
    s.words = c.at("words").get<std::vector<std::string>>();
    for (const auto& e : events.subspan(1)) {
      const auto kind = e.at("event").get<std::string>();
      if (kind == "transmit") {
        apply_transmit(s, e.at("word").get<std::string>(), e.at("timeline").get<MotorTimeline>(),
                       e.at("at_ms").get<std::int64_t>());
      } else if (kind == "guess") {
        apply_guess(s, e.at("record").get<int>(), e.at("guess").get<std::string>(), e.at("at_ms").get<std::int64_t>());
      } else if (kind == "rating") {
        apply_rating(s, e.at("value").get<double>());
      } else if (kind == "closed") {
        s.status = SessionStatus::Closed;
      } else {
        throw Error(ErrorCode::Io, fmt::format("unknown session event '{}'", kind));
      }
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, fmt::format("malformed session log: {}", e.what()));
  }
}

TrainerService::TrainerService(SessionStore store, WallClock clock)
    : store_(std::move(store)), clock_(clock ? std::move(clock) : WallClock(system_now_ms)) {
  for (auto& s : store_.load_all()) {
    int numeric = 0;
    if (s.id.size() > 1 && s.id.front() == 's') {
      try {
        numeric = std::stoi(s.id.substr(1));
      } catch (const std::exception&) {
      }
    }
    next_id_ = std::max(next_id_, numeric + 1);
    auto slot = std::make_shared<Slot>();
    const auto id = s.id;
    slot->session = std::move(s);
    slots_.emplace(id, std::move(slot));
  }
}

std::shared_ptr<TrainerService::Slot> TrainerService::slot(const std::string& session_id) const {
  std::shared_lock lock(map_mutex_);
  auto it = slots_.find(session_id);
  if (it == slots_.end()) throw Error(ErrorCode::UnknownSession, fmt::format("no session '{}'", session_id));
  return it->second;
}

Session TrainerService::start_session(const SessionRequest& request) {
  request.config.validate();
  if (request.char_gap_ms <= 0) {
    throw Error(ErrorCode::InvalidConfig, fmt::format("character gap {} ms is not positive", request.char_gap_ms));
  }
  if (request.subject.empty()) throw Error(ErrorCode::InvalidInput, "subject label is empty");

  Session s;
  s.subject = request.subject;
  s.char_gap_ms = request.char_gap_ms;
  s.config = request.config;
  s.seed = request.seed.value_or(std::random_device{}());
  s.words = pick_words(s.config, s.seed);

  auto slot = std::make_shared<Slot>();
  {
    std::unique_lock lock(map_mutex_);
    s.id = fmt::format("s{:04d}", next_id_++);
    slot->session = s;
    store_.append(s.id, created_event(s));
    slots_.emplace(s.id, slot);
  }
  return s;
}

WordRecord TrainerService::transmit_word(const std::string& session_id, std::optional<std::string> word) {
  auto sl = slot(session_id);
  std::lock_guard lock(sl->mutex);
  auto& s = sl->session;
  require_active(s);
  if (!word) {
    word = s.next_word();
    if (!word) throw Error(ErrorCode::InvalidInput, fmt::format("session {} has no planned words left", s.id));
  }
  const std::string w = lowercase(*word);
  encode_text(w);  // UnsupportedCharacter before anything is recorded
  auto timeline = transmit_timeline(w, s.char_gap_ms);
  const auto at = clock_();
  const auto& r = apply_transmit(s, w, std::move(timeline), at);
  store_.append(s.id, {{"event", "transmit"}, {"record", r.id}, {"word", r.word}, {"at_ms", at}, {"timeline", r.timeline}});
  return r;
}

WordRecord TrainerService::record_guess(const std::string& session_id, int record_id, const std::string& guess) {
  auto sl = slot(session_id);
  std::lock_guard lock(sl->mutex);
  const auto at = clock_();
  const auto& r = apply_guess(sl->session, record_id, guess, at);
  store_.append(session_id, {{"event", "guess"}, {"record", record_id}, {"guess", r.guess->text}, {"at_ms", at}});
  return r;
}

Session TrainerService::submit_rating(const std::string& session_id, double rating) {
  auto sl = slot(session_id);
  std::lock_guard lock(sl->mutex);
  apply_rating(sl->session, rating);
  store_.append(session_id, {{"event", "rating"}, {"value", rating}});
  return sl->session;
}

Session TrainerService::close_session(const std::string& session_id) {
  auto sl = slot(session_id);
  std::lock_guard lock(sl->mutex);
  require_active(sl->session);
  sl->session.status = SessionStatus::Closed;
  store_.append(session_id, {{"event", "closed"}});
  return sl->session;
}

MotorTimeline TrainerService::timeline(const std::string& session_id, int record_id) const {
  auto sl = slot(session_id);
  std::lock_guard lock(sl->mutex);
  return find_record(sl->session, record_id).timeline;
}

Session TrainerService::session(const std::string& session_id) const {
  auto sl = slot(session_id);
  std::lock_guard lock(sl->mutex);
  return sl->session;
}

std::vector<Session> TrainerService::sessions() const {
  std::vector<std::shared_ptr<Slot>> all;
  {
    std::shared_lock lock(map_mutex_);
    for (const auto& [id, sl] : slots_) all.push_back(sl);
  }
  std::vector<Session> out;
  out.reserve(all.size());
  for (const auto& sl : all) {
    std::lock_guard lock(sl->mutex);
    out.push_back(sl->session);
  }
  return out;
}

SessionReport TrainerService::report(const ReportOptions& options) const {
  const auto snapshot = sessions();
  return session_report(snapshot, options);
}

void to_json(nlohmann::json& j, const TrialConfig& c) {
  j = nlohmann::json{{"word_length", c.word_length},
                     {"words_per_block", c.words_per_block},
                     {"gap_schedule", c.gap_schedule},
                     {"familiarization_minutes", c.familiarization_minutes}};
}

void from_json(const nlohmann::json& j, TrialConfig& c) {
  TrialConfig d;
  c.word_length = j.value("word_length", d.word_length);
  c.words_per_block = j.value("words_per_block", d.words_per_block);
  c.gap_schedule = j.value("gap_schedule", d.gap_schedule);
  c.familiarization_minutes = j.value("familiarization_minutes", d.familiarization_minutes);
}

void to_json(nlohmann::json& j, const WordRecord& r) {
  j = nlohmann::json{{"record", r.id},
                     {"word", r.word},
                     {"transmitted_at_ms", r.transmitted_at_ms},
                     {"pulses", r.pulse_count()},
                     {"makespan_ms", timeline_summary(r.timeline).makespan.count()},
                     {"guess", nullptr}};
  if (r.guess) {
    const auto correct = std::count(r.guess->correct.begin(), r.guess->correct.end(), true);
    j["guess"] = {{"text", r.guess->text},
                  {"correct", r.guess->correct},
                  {"accuracy_pct", 100.0 * static_cast<double>(correct) / static_cast<double>(r.guess->correct.size())},
                  {"at_ms", r.guess->at_ms}};
  }
}

void to_json(nlohmann::json& j, const Session& s) {
  j = nlohmann::json{{"id", s.id},
                     {"subject", s.subject},
                     {"char_gap_ms", s.char_gap_ms},
                     {"config", s.config},
                     {"seed", s.seed},
                     {"words", s.words},
                     {"records", s.records},
                     {"status", s.status == SessionStatus::Active ? "active" : "closed"},
                     {"rating", nullptr},
                     {"accuracy_pct", nullptr}};
  if (s.rating) j["rating"] = *s.rating;
  if (auto acc = s.accuracy()) j["accuracy_pct"] = *acc;
}

void to_json(nlohmann::json& j, const SessionReport& r) {
  j = nlohmann::json{{"summaries", r.summaries}, {"anova", nullptr},          {"reference_gap_ms", nullptr},
                     {"pairwise", r.pairwise},   {"usability_mean", nullptr}, {"note", r.note}};
  if (r.anova) j["anova"] = *r.anova;
  if (r.reference_gap) j["reference_gap_ms"] = *r.reference_gap;
  if (r.usability_mean) j["usability_mean"] = *r.usability_mean;
}

}  // namespace brailleband
