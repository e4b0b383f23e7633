#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include <unistd.h>

#include "brailleband/error.hpp"
#include "brailleband/trainer.hpp"
#include "support/oracles.hpp"

namespace brailleband {
namespace {

using namespace std::chrono_literals;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("bb_trainer_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

TrainerService::WallClock ticking() {
  auto t = std::make_shared<std::int64_t>(0);
  return [t] { return *t += 10; };
}

SessionRequest request(int gap, std::uint64_t seed = 1) { return {"s1", gap, TrialConfig{}, seed}; }

TEST(Words, SeededPickerIsDeterministic) {
  const TrialConfig cfg;
  EXPECT_EQ(pick_words(cfg, 42), pick_words(cfg, 42));
  EXPECT_NE(pick_words(cfg, 42), pick_words(cfg, 43));
  for (const auto& w : pick_words(cfg, 42)) EXPECT_EQ(w.size(), 3U);
  TrialConfig four;
  four.word_length = 4;
  four.words_per_block = 50;
  for (const auto& w : pick_words(four, 1)) EXPECT_EQ(w.size(), 4U);
}

TEST(Words, CorpusIsEncodable) {
  for (auto w : word_corpus()) EXPECT_NO_THROW(encode_text(w)) << w;
}

TEST(TrialConfigCheck, RejectsBadGaps) {
  TrialConfig cfg;
  cfg.gap_schedule = {1000, 0};
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::InvalidConfig);
  cfg.gap_schedule = {1000, 1000};
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::InvalidConfig);
  cfg.gap_schedule = {1000};
  cfg.word_length = 9;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::InvalidConfig);
}

TEST(Service, StartSession) {
  TrainerService svc({}, ticking());
  const auto s = svc.start_session(request(1000, 42));
  EXPECT_EQ(s.id, "s0001");
  EXPECT_EQ(s.status, SessionStatus::Active);
  EXPECT_TRUE(s.records.empty());
  EXPECT_EQ(s.words, pick_words(TrialConfig{}, 42));
  EXPECT_EQ(svc.start_session(request(1000)).id, "s0002");
  EXPECT_EQ(code_of([&] { svc.start_session(request(0)); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([&] { svc.session("nope"); }), ErrorCode::UnknownSession);
}

TEST(Service, TransmitCat) {
  TrainerService svc({}, ticking());
  const auto id = svc.start_session(request(1000)).id;
  const auto r = svc.transmit_word(id, "cat");
  EXPECT_EQ(r.pulse_count(), 7);
  const auto summary = timeline_summary(r.timeline);
  EXPECT_EQ(summary.makespan, 7200ms);
  const auto oracle = schedule_text(encode_text("cat"), TimingConfig::with_gap(1000ms));
  EXPECT_EQ(timeline_events(r.timeline), oracle.events);
  EXPECT_EQ(summary.makespan, oracle.total_duration);

  const auto again = svc.transmit_word(id, "cat");
  EXPECT_EQ(again.id, 2);
  EXPECT_EQ(again.timeline, r.timeline);
  EXPECT_EQ(svc.session(id).records.size(), 2U);
}

TEST(Service, TransmitPlannedWords) {
  TrainerService svc({}, ticking());
  const auto s = svc.start_session(request(500, 9));
  for (const auto& w : s.words) EXPECT_EQ(svc.transmit_word(s.id).word, w);
  EXPECT_EQ(code_of([&] { svc.transmit_word(s.id); }), ErrorCode::InvalidInput);
}

TEST(Service, TransmitErrors) {
  TrainerService svc({}, ticking());
  const auto id = svc.start_session(request(1000)).id;
  EXPECT_EQ(code_of([&] { svc.transmit_word(id, "c@t"); }), ErrorCode::UnsupportedCharacter);
  EXPECT_TRUE(svc.session(id).records.empty());
  svc.submit_rating(id, 9);
  EXPECT_EQ(code_of([&] { svc.transmit_word(id, "cat"); }), ErrorCode::SessionClosed);
}

TEST(Service, Guessing) {
  TrainerService svc({}, ticking());
  const auto id = svc.start_session(request(1000)).id;
  svc.transmit_word(id, "cat");
  svc.transmit_word(id, "cat");
  EXPECT_EQ(code_of([&] { svc.record_guess(id, 1, "ca"); }), ErrorCode::LengthMismatch);
  const auto scored = svc.record_guess(id, 1, "cbt");
  EXPECT_EQ(scored.guess->correct, (std::vector<bool>{true, false, true}));
  EXPECT_NEAR(*svc.session(id).accuracy(), 200.0 / 3.0, 1e-12);
  EXPECT_EQ(code_of([&] { svc.record_guess(id, 1, "cat"); }), ErrorCode::AlreadyScored);
  svc.record_guess(id, 2, "CAT");
  EXPECT_NEAR(*svc.session(id).accuracy(), 500.0 / 6.0, 1e-12);
  EXPECT_EQ(code_of([&] { svc.record_guess(id, 3, "cat"); }), ErrorCode::UnknownRecord);
  EXPECT_EQ(code_of([&] { svc.timeline(id, 7); }), ErrorCode::UnknownRecord);
}

TEST(Service, PerfectGuess) {
  TrainerService svc({}, ticking());
  const auto id = svc.start_session(request(1000)).id;
  svc.transmit_word(id, "cat");
  svc.record_guess(id, 1, "cat");
  EXPECT_EQ(*svc.session(id).accuracy(), 100.0);
}

TEST(Service, RatingClosesSession) {
  TrainerService svc({}, ticking());
  const auto id = svc.start_session(request(1000)).id;
  EXPECT_EQ(code_of([&] { svc.submit_rating(id, 10.5); }), ErrorCode::InvalidInput);
  const auto s = svc.submit_rating(id, 8.5);
  EXPECT_EQ(s.status, SessionStatus::Closed);
  EXPECT_EQ(s.rating, 8.5);
  EXPECT_EQ(code_of([&] { svc.submit_rating(id, 7); }), ErrorCode::SessionClosed);
  EXPECT_EQ(code_of([&] { svc.close_session(id); }), ErrorCode::SessionClosed);
}

TEST(Service, AccuracyIsOrderIndependent) {
  std::mt19937_64 rng(6);
  std::vector<std::pair<std::string, std::string>> trials;
  for (int i = 0; i < 12; ++i) {
    std::string w = pick_words(TrialConfig{}, rng())[0];
    std::string g = w;
    if (rng() % 2) g[rng() % 3] = 'z';
    trials.emplace_back(w, g);
  }
  auto run = [&](const std::vector<std::pair<std::string, std::string>>& order) {
    TrainerService svc({}, ticking());
    const auto id = svc.start_session(request(800)).id;
    for (const auto& [w, g] : order) svc.record_guess(id, svc.transmit_word(id, w).id, g);
    return *svc.session(id).accuracy();
  };
  const double forward = run(trials);
  std::shuffle(trials.begin(), trials.end(), rng);
  EXPECT_DOUBLE_EQ(run(trials), forward);
}

TEST(Persistence, RoundTrip) {
  TempDir dir;
  std::vector<Session> before;
  {
    TrainerService svc(SessionStore(dir.path()), ticking());
    const auto a = svc.start_session(request(1000, 5)).id;
    const auto b = svc.start_session(request(400, 6)).id;
    svc.transmit_word(a, "cat");
    svc.record_guess(a, 1, "cbt");
    svc.transmit_word(a);
    svc.transmit_word(b, "q1");
    svc.submit_rating(b, 7.5);
    before = svc.sessions();
  }
  TrainerService reloaded(SessionStore(dir.path()), ticking());
  EXPECT_EQ(reloaded.sessions(), before);
  EXPECT_EQ(reloaded.start_session(request(1000)).id, "s0003");
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "s0001.jsonl"));
}

TEST(Persistence, ReplayedTimelinesAreBitIdentical) {
  TempDir dir;
  {
    TrainerService svc(SessionStore(dir.path()), ticking());
    const auto id = svc.start_session(request(1200, 3)).id;
    for (int i = 0; i < 10; ++i) svc.transmit_word(id);
  }
  for (const auto& s : SessionStore(dir.path()).load_all()) {
    for (const auto& r : s.records) EXPECT_EQ(transmit_timeline(r.word, s.char_gap_ms), r.timeline) << r.word;
  }
}

TEST(Persistence, CorruptLog) {
  TempDir dir;
  std::filesystem::create_directories(dir.path());
  std::ofstream(dir.path() / "s0001.jsonl") << "{\"event\":\"transmit\"}\n";
  EXPECT_EQ(code_of([&] { SessionStore(dir.path()).load_all(); }), ErrorCode::Io);
  std::ofstream(dir.path() / "s0001.jsonl") << "{not json\n";
  EXPECT_EQ(code_of([&] { SessionStore(dir.path()).load_all(); }), ErrorCode::Io);
}

TEST(Concurrency, ParallelSessions) {
  TrainerService svc({}, ticking());
  std::vector<std::string> ids;
  for (int i = 0; i < 4; ++i) ids.push_back(svc.start_session(request(500, static_cast<std::uint64_t>(i))).id);
  std::vector<std::thread> workers;
  for (const auto& id : ids) {
    for (int k = 0; k < 2; ++k) {
      workers.emplace_back([&svc, id] {
        for (int i = 0; i < 5; ++i) svc.transmit_word(id, "dog");
      });
    }
  }
  workers.emplace_back([&svc] {
    for (int i = 0; i < 20; ++i) (void)svc.sessions();
  });
  for (auto& w : workers) w.join();
  for (const auto& id : ids) {
    const auto s = svc.session(id);
    ASSERT_EQ(s.records.size(), 10U);
    for (std::size_t i = 0; i < s.records.size(); ++i) EXPECT_EQ(s.records[i].id, static_cast<int>(i) + 1);
  }
}

TEST(Report, EmptyAndSingleGap) {
  TrainerService svc({}, ticking());
  EXPECT_EQ(code_of([&] { svc.report(); }), ErrorCode::InsufficientData);
  for (int i = 0; i < 2; ++i) {
    const auto id = svc.start_session(request(1000)).id;
    svc.record_guess(id, svc.transmit_word(id, "cat").id, i == 0 ? "cat" : "cbt");
  }
  const auto r = svc.report();
  ASSERT_EQ(r.summaries.size(), 1U);
  EXPECT_FALSE(r.anova.has_value());
  EXPECT_NE(r.note.find("ANOVA unavailable"), std::string::npos);
  EXPECT_NEAR(r.summaries[0].mean, (100.0 + 200.0 / 3.0) / 2.0, 1e-12);
}

TEST(Report, MatchesStatsOnSessionSummaries) {
  TrainerService svc({}, ticking());
  std::mt19937_64 rng(12);
  RawData raw;
  for (int gap : {1500, 1000, 500}) {
    for (int subject = 0; subject < 4; ++subject) {
      const auto id = svc.start_session(request(gap, rng())).id;
      int correct = 0;
      for (int w = 0; w < 5; ++w) {
        const auto r = svc.transmit_word(id);
        std::string g = r.word;
        for (auto& c : g) {
          if (rng() % 100 < static_cast<unsigned>(gap / 25)) c = c == 'z' ? 'y' : 'z';
        }
        for (std::size_t i = 0; i < g.size(); ++i) correct += g[i] == r.word[i];
        svc.record_guess(id, r.id, g);
      }
      raw[gap].push_back(100.0 * correct / 15.0);
      svc.submit_rating(id, 8.0 + subject % 2);
    }
  }
  const auto r = svc.report();
  ASSERT_TRUE(r.anova);
  EXPECT_NEAR(r.anova->f_stat, anova_from_raw(raw).f_stat, 1e-9);
  EXPECT_EQ(r.summaries.front().gap_ms, 1500);
  EXPECT_EQ(r.pairwise.size(), 2U);
  EXPECT_NEAR(*r.usability_mean, 8.5, 1e-12);

  ReportOptions only;
  only.gaps = std::vector<int>{1000, 500};
  only.reference_gap = 500;
  const auto sub = svc.report(only);
  EXPECT_EQ(sub.summaries.size(), 2U);
  EXPECT_EQ(*sub.reference_gap, 500);
  EXPECT_EQ(sub.pairwise.at(0).family_size, 1);
}

}  // namespace
}  // namespace brailleband
