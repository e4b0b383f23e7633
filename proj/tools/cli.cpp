#include "brailleband_tools/cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "brailleband/braille.hpp"
#include "brailleband/emulator.hpp"
#include "brailleband/error.hpp"
#include "brailleband/http_api.hpp"
#include "brailleband/json_io.hpp"
#include "brailleband/link.hpp"
#include "brailleband/stats.hpp"
#include "brailleband/timing.hpp"
#include "brailleband/trainer.hpp"

namespace brailleband::cli {

namespace {

struct TimingFlags {
  long long gap_ms = 1000;
  std::optional<long long> word_gap_ms;
  long long dot_on_ms = 300;
  long long dot_off_ms = 300;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--gap", gap_ms, "character gap in ms")->required()->check(CLI::NonNegativeNumber);
    cmd.add_option("--word-gap", word_gap_ms, "word gap in ms (default 2 x gap)")->check(CLI::NonNegativeNumber);
    cmd.add_option("--dot-on", dot_on_ms, "pulse length in ms")->check(CLI::PositiveNumber);
    cmd.add_option("--dot-off", dot_off_ms, "silence after each pulse in ms")->check(CLI::PositiveNumber);
  }

  TimingConfig config() const {
    TimingConfig cfg = TimingConfig::with_gap(Millis{gap_ms});
    if (word_gap_ms) cfg.word_gap = Millis{*word_gap_ms};
    cfg.dot_on = Millis{dot_on_ms};
    cfg.dot_off = Millis{dot_off_ms};
    cfg.validate();
    return cfg;
  }
};

void add_format(CLI::App& cmd, std::string& format) {
  cmd.add_option("--format", format, "output format")->check(CLI::IsMember({"text", "structured"}));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open {}", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> parse_ratings(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, fmt::format("rating '{}' is not a number", item));
    }
  }
  return out;
}

PairwiseOptions pairwise_options(const std::string& family, double alpha) {
  return {alpha, family == "selected" ? CorrectionFamily::SelectedPairs : CorrectionFamily::AllPairs};
}

void print_encode(std::ostream& out, const std::string& text, bool skip, bool structured) {
  const auto tokens = encode_text(text, skip ? UnsupportedPolicy::Skip : UnsupportedPolicy::Strict);
  if (structured) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : tokens) {
      if (const auto* ct = std::get_if<CellToken>(&t)) {
        arr.push_back({{"char", std::string(1, ct->source)}, {"dots", ct->cell.dots()}});
      } else {
        arr.push_back({{"break", true}});
      }
    }
    out << nlohmann::json{{"tokens", arr}}.dump() << '\n';
    return;
  }
  for (const auto& t : tokens) {
    if (const auto* ct = std::get_if<CellToken>(&t)) {
      out << ct->source << ": " << ct->cell.to_string() << '\n';
    } else {
      out << "(space)\n";
    }
  }
}

void print_stats(std::ostream& out, const std::vector<SampleSummary>& groups, std::optional<int> reference,
                 const PairwiseOptions& options, bool structured) {
  const auto anova = anova_from_summary(groups);
  const int ref = reference.value_or(best_treatment(groups));
  const auto pairs = pairwise_vs_reference(groups, ref, options);
  if (structured) {
    out << nlohmann::json{{"summaries", groups}, {"anova", anova}, {"reference_gap_ms", ref}, {"pairwise", pairs}}.dump()
        << '\n';
    return;
  }
  out << format_table_summaries(groups) << '\n' << format_anova(anova) << '\n' << format_pairwise(pairs);
}

std::sig_atomic_t volatile g_stop_requested = 0;
HttpServer* g_server = nullptr;

extern "C" void handle_stop(int) {
  g_stop_requested = 1;
  if (g_server) g_server->stop();
}

}  // namespace

std::string trim_decimal(double value) {
  std::string s = fmt::format("{:.4f}", value);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.push_back('0');
  return s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"BrailleBand haptic braille toolkit", "brailleband"};
  app.require_subcommand(1);
  std::string format = "text";

  std::string text;
  bool table = false;
  bool skip = false;
  auto* encode = app.add_subcommand("encode", "print the braille cells for TEXT");
  encode->add_option("text", text, "letters, digits and spaces");
  encode->add_flag("--table", table, "dump the whole character table");
  encode->add_flag("--skip-unsupported", skip, "drop characters outside the alphabet");
  add_format(*encode, format);

  TimingFlags timing;
  auto* schedule = app.add_subcommand("schedule", "print the vibration schedule for TEXT");
  schedule->add_option("text", text)->required();
  timing.add_to(*schedule);
  add_format(*schedule, format);

  bool preamble = false;
  auto* transmit = app.add_subcommand("transmit", "print the host's timed byte emissions for TEXT");
  transmit->add_option("text", text)->required();
  transmit->add_flag("--preamble", preamble, "prefix config frames carrying dot timing");
  timing.add_to(*transmit);
  add_format(*transmit, format);

  auto* emulate = app.add_subcommand("emulate", "send TEXT over the link and print the band's motor timeline");
  emulate->add_option("text", text)->required();
  timing.add_to(*emulate);
  add_format(*emulate, format);

  double gap_s = 1.0;
  auto* ctr = app.add_subcommand("ctr", "character transfer rates for a gap in seconds");
  ctr->add_option("--gap", gap_s, "character gap in seconds")->required()->check(CLI::NonNegativeNumber);
  add_format(*ctr, format);

  std::string summary_file;
  std::string raw_file;
  bool embedded = false;
  std::string ratings;
  std::optional<int> reference;
  std::string family = "all";
  double alpha = 0.05;
  auto* stats = app.add_subcommand("stats", "ANOVA and Bonferroni/Holm comparisons");
  auto* stats_src = stats->add_option_group("source");
  stats_src->add_option("--summary", summary_file, "CSV gap_ms,mean,sd,n");
  stats_src->add_option("--raw", raw_file, "CSV subject,gap_ms,accuracy_pct");
  stats_src->add_flag("--embedded", embedded, "use the built-in reading-speed table");
  stats_src->add_option("--ratings", ratings, "comma-separated 0..10 usability ratings");
  stats_src->require_option(1);
  stats->add_option("--reference", reference, "reference gap in ms (default: best treatment)");
  stats->add_option("--family", family, "correction family")->check(CLI::IsMember({"all", "selected"}));
  stats->add_option("--alpha", alpha)->check(CLI::Range(0.0, 1.0));
  add_format(*stats, format);

  std::string store_dir;
  std::vector<int> gaps;
  auto* report = app.add_subcommand("report", "accuracy summaries, ANOVA and comparisons from stored trainer sessions");
  report->add_option("--store", store_dir, "session directory")->required();
  report->add_option("--gaps", gaps, "restrict to these gaps")->delimiter(',');
  report->add_option("--reference", reference);
  report->add_option("--family", family)->check(CLI::IsMember({"all", "selected"}));
  report->add_option("--alpha", alpha)->check(CLI::Range(0.0, 1.0));
  add_format(*report, format);

  int port = 8080;
  std::string host = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "run the trainer HTTP service");
  serve->add_option("--port", port)->check(CLI::Range(0, 65535));
  serve->add_option("--host", host);
  serve->add_option("--store", store_dir, "session directory (omit for in-memory)");

  auto* session = app.add_subcommand("session", "trainer endpoints for headless runs");
  session->require_subcommand(1);
  std::string session_id;
  std::string subject;
  int session_gap = 1000;
  std::optional<std::uint64_t> seed;
  int words = 10;
  std::optional<std::string> word;
  int record = 0;
  std::string guess;
  double rating = 0.0;

  auto* s_create = session->add_subcommand("create", "POST /sessions");
  s_create->add_option("--store", store_dir)->required();
  s_create->add_option("--subject", subject)->required();
  s_create->add_option("--gap", session_gap, "character gap in ms")->required();
  s_create->add_option("--seed", seed);
  s_create->add_option("--words", words, "words per block");
  add_format(*s_create, format);

  auto* s_transmit = session->add_subcommand("transmit", "POST /sessions/{id}/transmit");
  s_transmit->add_option("--store", store_dir)->required();
  s_transmit->add_option("--id", session_id)->required();
  s_transmit->add_option("--word", word, "defaults to the next planned word");
  add_format(*s_transmit, format);

  auto* s_guess = session->add_subcommand("guess", "POST /sessions/{id}/guess");
  s_guess->add_option("--store", store_dir)->required();
  s_guess->add_option("--id", session_id)->required();
  s_guess->add_option("--record", record)->required();
  s_guess->add_option("--guess", guess)->required();
  add_format(*s_guess, format);

  auto* s_timeline = session->add_subcommand("timeline", "GET /sessions/{id}/timeline/{record}");
  s_timeline->add_option("--store", store_dir)->required();
  s_timeline->add_option("--id", session_id)->required();
  s_timeline->add_option("--record", record)->required();
  add_format(*s_timeline, format);

  auto* s_rate = session->add_subcommand("rate", "POST /sessions/{id}/rating");
  s_rate->add_option("--store", store_dir)->required();
  s_rate->add_option("--id", session_id)->required();
  s_rate->add_option("--rating", rating)->required()->check(CLI::Range(0.0, 10.0));
  add_format(*s_rate, format);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    app.exit(e, out, err);
    return kExitUsage;
  }

  const bool structured = format == "structured";
  try {
    if (*encode) {
      if (table) {
        out << table_dump();
      } else {
        print_encode(out, text, skip, structured);
      }
    } else if (*schedule) {
      const auto s = schedule_text(encode_text(text), timing.config());
      out << (structured ? schedule_to_json(s) + "\n" : schedule_to_text(s));
    } else if (*transmit) {
      VirtualClock clock;
      const auto bytes = host_transmit(text, timing.config(), clock, HostOptions{preamble});
      if (structured) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& b : bytes) arr.push_back({{"t_ms", b.at.count()}, {"byte", b.byte}});
        out << nlohmann::json{{"emissions", arr}, {"end_ms", clock.now().count()}}.dump() << '\n';
      } else {
        out << emissions_to_text(bytes) << "end " << clock.now().count() << '\n';
      }
    } else if (*emulate) {
      const auto trace = link_roundtrip(text, timing.config());
      const auto timeline = apply_commands(trace.commands, trace.end_of_transmission);
      out << (structured ? timeline_to_json(timeline) + "\n" : timeline_to_text(timeline));
    } else if (*ctr) {
      const auto c = ctr_summary(gap_s);
      if (structured) {
        out << nlohmann::json{{"gap_s", gap_s}, {"max", c.maximum}, {"min", c.minimum}, {"avg", c.average}}.dump()
            << '\n';
      } else {
        out << fmt::format("max {} min {} avg {}\n", trim_decimal(c.maximum), trim_decimal(c.minimum),
                           trim_decimal(c.average));
      }
    } else if (*stats) {
      const auto options = pairwise_options(family, alpha);
      if (!ratings.empty()) {
        const auto values = parse_ratings(ratings);
        const double mean = usability_mean(values);
        if (structured) {
          out << nlohmann::json{{"usability_mean", mean}, {"n", values.size()}}.dump() << '\n';
        } else {
          out << fmt::format("usability mean {:.2f} over {} rating(s)\n", mean, values.size());
        }
      } else if (!raw_file.empty()) {
        std::vector<SampleSummary> groups;
        for (const auto& [gap, values] : parse_raw_csv(read_file(raw_file))) groups.push_back(summarize(gap, values));
        std::sort(groups.begin(), groups.end(),
                  [](const SampleSummary& a, const SampleSummary& b) { return a.gap_ms > b.gap_ms; });
        print_stats(out, groups, reference, options, structured);
      } else {
        const auto groups = embedded ? reading_speed_table() : parse_summary_csv(read_file(summary_file));
        print_stats(out, groups, reference, options, structured);
      }
    } else if (*report) {
      TrainerService service{SessionStore(store_dir)};
      ReportOptions opts;
      if (!gaps.empty()) opts.gaps = gaps;
      opts.reference_gap = reference;
      opts.pairwise = pairwise_options(family, alpha);
      const auto r = service.report(opts);
      out << (structured ? nlohmann::json(r).dump() + "\n" : format_report(r));
    } else if (*serve) {
      TrainerService service{store_dir.empty() ? SessionStore{} : SessionStore(store_dir)};
      HttpServer server(service);
      const int bound = server.bind(host, port);
      if (bound < 0) throw Error(ErrorCode::Io, fmt::format("cannot bind {}:{}", host, port));
      g_server = &server;
      std::signal(SIGINT, handle_stop);
      std::signal(SIGTERM, handle_stop);
      out << fmt::format("listening on http://{}:{}\n", host, bound) << std::flush;
      const bool ok = server.run();
      g_server = nullptr;
      if (!ok && !g_stop_requested) throw Error(ErrorCode::Io, "listener stopped unexpectedly");
    } else if (*session) {
      TrainerService service{SessionStore(store_dir)};
      nlohmann::json result;
      if (*s_create) {
        SessionRequest request;
        request.subject = subject;
        request.char_gap_ms = session_gap;
        request.seed = seed;
        request.config.words_per_block = words;
        result = service.start_session(request);
      } else if (*s_transmit) {
        result = service.transmit_word(session_id, word);
      } else if (*s_guess) {
        result = service.record_guess(session_id, record, guess);
        const auto acc = service.session(session_id).accuracy();
        result["session_accuracy_pct"] = acc ? nlohmann::json(*acc) : nlohmann::json();
      } else if (*s_timeline) {
        const auto t = service.timeline(session_id, record);
        if (!structured) {
          out << timeline_to_text(t);
          return kExitOk;
        }
        result = t;
      } else if (*s_rate) {
        result = service.submit_rating(session_id, rating);
      }
      out << result.dump(structured ? -1 : 2) << '\n';
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitOk;
}

}  // namespace brailleband::cli
