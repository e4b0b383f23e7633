#include "brailleband/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "brailleband/distributions.hpp"
#include "brailleband/error.hpp"

namespace brailleband {

void SampleSummary::validate() const {
  if (n < 2) throw Error(ErrorCode::InvalidInput, fmt::format("gap {} ms: n = {} (need at least 2)", gap_ms, n));
  if (!(sd >= 0.0)) throw Error(ErrorCode::InvalidInput, fmt::format("gap {} ms: negative sd {}", gap_ms, sd));
  if (!(mean >= 0.0 && mean <= 100.0)) {
    throw Error(ErrorCode::InvalidInput, fmt::format("gap {} ms: mean {} outside 0..100", gap_ms, mean));
  }
}

const std::vector<SampleSummary>& reading_speed_table() {
  static const std::vector<SampleSummary> table{
      {2000, 90.1, 10.94, 10}, {1500, 90.1, 6.24, 10},  {1200, 87.9, 6.24, 10},  {1000, 87.9, 12.11, 10},
      {800, 69.1, 18.03, 10},  {500, 53.2, 21.02, 10},  {400, 46.4, 22.84, 10},
  };
  return table;
}

AnovaResult anova_from_summary(std::span<const SampleSummary> groups) {
  if (groups.size() < 2) {
    throw Error(ErrorCode::InvalidInput, fmt::format("ANOVA needs at least 2 groups, got {}", groups.size()));
  }
  int total_n = 0;
  double weighted_sum = 0.0;
  for (const auto& g : groups) {
    g.validate();
    total_n += g.n;
    weighted_sum += g.n * g.mean;
  }
  const double grand_mean = weighted_sum / total_n;

  AnovaResult r{};
  r.ss_treatment = 0.0;
  r.ss_error = 0.0;
  for (const auto& g : groups) {
    const double dev = g.mean - grand_mean;
    r.ss_treatment += g.n * dev * dev;
    r.ss_error += (g.n - 1) * g.sd * g.sd;
  }
  r.ss_total = r.ss_treatment + r.ss_error;
  r.df_treatment = static_cast<int>(groups.size()) - 1;
  r.df_error = total_n - static_cast<int>(groups.size());
  r.ms_treatment = r.ss_treatment / r.df_treatment;
  r.ms_error = r.ss_error / r.df_error;
  if (r.ms_error == 0.0) {
    throw Error(ErrorCode::DegenerateData, "error mean square is zero; F is undefined");
  }
  r.f_stat = r.ms_treatment / r.ms_error;
  r.p_value = f_sf(r.f_stat, r.df_treatment, r.df_error);
  return r;
}

SampleSummary summarize(int gap_ms, std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::InvalidInput,
                fmt::format("gap {} ms has {} observation(s); need at least 2", gap_ms, values.size()));
  }
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {gap_ms, mean, std::sqrt(ss / (n - 1.0)), static_cast<int>(values.size())};
}

AnovaResult anova_from_raw(const RawData& data) {
  std::vector<SampleSummary> groups;
  groups.reserve(data.size());
  for (const auto& [gap, values] : data) groups.push_back(summarize(gap, values));
  return anova_from_summary(groups);
}

TStat pairwise_t(const SampleSummary& a, const SampleSummary& b, const AnovaResult& anova) {
  const double se = std::sqrt(anova.ms_error * (1.0 / a.n + 1.0 / b.n));
  const double t = std::fabs(a.mean - b.mean) / se;
  return {t, t_sf(t, anova.df_error)};
}

std::vector<PairwiseResult> pairwise_vs_reference(std::span<const SampleSummary> groups, int reference_gap,
                                                  PairwiseOptions options) {
  const auto ref_it = std::find_if(groups.begin(), groups.end(),
                                   [&](const SampleSummary& g) { return g.gap_ms == reference_gap; });
  if (ref_it == groups.end()) {
    throw Error(ErrorCode::UnknownReference, fmt::format("no treatment with gap {} ms", reference_gap));
  }
  const auto ref = static_cast<std::size_t>(ref_it - groups.begin());
  const AnovaResult anova = anova_from_summary(groups);

  struct Member {
    std::size_t a;
    std::size_t b;
    double p;
    bool holm = false;
  };
  std::vector<Member> family;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      if (options.family == CorrectionFamily::SelectedPairs && i != ref && j != ref) continue;
      family.push_back({i, j, pairwise_t(groups[i], groups[j], anova).p});
    }
  }
  const double m = static_cast<double>(family.size());

  std::vector<std::size_t> order(family.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return family[x].p < family[y].p; });
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    auto& member = family[order[rank]];
    if (!(member.p < options.alpha / (m - static_cast<double>(rank)))) break;
    member.holm = true;
  }

  std::vector<PairwiseResult> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (i == ref) continue;
    const auto it = std::find_if(family.begin(), family.end(), [&](const Member& mb) {
      return (mb.a == ref && mb.b == i) || (mb.a == i && mb.b == ref);
    });
    const TStat ts = pairwise_t(groups[ref], groups[i], anova);
    out.push_back({reference_gap, groups[i].gap_ms, ts.t, ts.p,
                   ts.p < options.alpha / m ? Verdict::Significant : Verdict::Insignificant,
                   it->holm ? Verdict::Significant : Verdict::Insignificant, static_cast<int>(family.size())});
  }
  return out;
}

int best_treatment(std::span<const SampleSummary> groups) {
  if (groups.empty()) throw Error(ErrorCode::InsufficientData, "no treatments");
  const auto it = std::min_element(groups.begin(), groups.end(), [](const SampleSummary& a, const SampleSummary& b) {
    if (a.mean != b.mean) return a.mean > b.mean;
    return a.sd < b.sd;
  });
  return it->gap_ms;
}

double usability_mean(std::span<const double> ratings) {
  if (ratings.empty()) throw Error(ErrorCode::EmptyRatings, "no usability ratings");
  for (double r : ratings) {
    if (!(r >= 0.0 && r <= 10.0)) throw Error(ErrorCode::InvalidInput, fmt::format("rating {} outside 0..10", r));
  }
  return std::accumulate(ratings.begin(), ratings.end(), 0.0) / static_cast<double>(ratings.size());
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

template <typename T>
T number_at(std::string_view field, std::size_t line_no, std::string_view column) {
  T value{};
  if (!parse_number(field, value)) {
    throw Error(ErrorCode::InvalidInput, fmt::format("line {}: {} '{}' is not a number", line_no, column, field));
  }
  return value;
}

// Yields (line number, fields) for data rows; validates an optional header.
template <typename Fn>
void for_each_row(const std::string& text, const std::vector<std::string_view>& columns, Fn&& fn) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  bool first_row = true;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line);
    if (fields.size() != columns.size()) {
      throw Error(ErrorCode::InvalidInput,
                  fmt::format("line {}: expected {} fields, got {}", line_no, columns.size(), fields.size()));
    }
    double probe = 0.0;
    if (first_row && !parse_number(fields.front(), probe)) {
      first_row = false;
      if (fields != columns) {
        throw Error(ErrorCode::InvalidInput,
                    fmt::format("line {}: header must be '{}'", line_no, fmt::join(columns, ",")));
      }
      continue;
    }
    first_row = false;
    fn(line_no, fields);
  }
}

std::string format_p(double p) {
  if (p < 1e-4) return "<0.0001";
  return fmt::format("{:.4f}", p);
}

}  // namespace

std::vector<SampleSummary> parse_summary_csv(const std::string& text) {
  std::vector<SampleSummary> out;
  for_each_row(text, {"gap_ms", "mean", "sd", "n"}, [&](std::size_t line_no, const auto& f) {
    SampleSummary s{number_at<int>(f[0], line_no, "gap_ms"), number_at<double>(f[1], line_no, "mean"),
                    number_at<double>(f[2], line_no, "sd"), number_at<int>(f[3], line_no, "n")};
    s.validate();
    if (std::any_of(out.begin(), out.end(), [&](const SampleSummary& o) { return o.gap_ms == s.gap_ms; })) {
      throw Error(ErrorCode::InvalidInput, fmt::format("line {}: gap {} ms listed twice", line_no, s.gap_ms));
    }
    out.push_back(s);
  });
  return out;
}

RawData parse_raw_csv(const std::string& text) {
  RawData out;
  for_each_row(text, {"subject", "gap_ms", "accuracy_pct"}, [&](std::size_t line_no, const auto& f) {
    if (f[0].empty()) throw Error(ErrorCode::InvalidInput, fmt::format("line {}: empty subject", line_no));
    const int gap = number_at<int>(f[1], line_no, "gap_ms");
    const double acc = number_at<double>(f[2], line_no, "accuracy_pct");
    if (!(acc >= 0.0 && acc <= 100.0)) {
      throw Error(ErrorCode::InvalidInput, fmt::format("line {}: accuracy {} outside 0..100", line_no, acc));
    }
    out[gap].push_back(acc);
  });
  return out;
}

std::string format_table_summaries(std::span<const SampleSummary> groups) {
  std::string out = fmt::format("{:<18} {:>28} {:>19} {:>4}\n", "Character gap(ms)", "Average reading accuracy(%)",
                                "Standard deviation", "n");
  for (const auto& g : groups) {
    out += fmt::format("{:<18} {:>28.1f} {:>19.2f} {:>4}\n", g.gap_ms, g.mean, g.sd, g.n);
  }
  return out;
}

std::string format_anova(const AnovaResult& a) {
  std::string out = fmt::format("{:<10} {:>15} {:>4} {:>12} {:>12} {:>9}\n", "source", "sum of squares", "df",
                                "mean square", "F statistic", "p-value");
  out += fmt::format("{:<10} {:>15.2f} {:>4} {:>12.2f} {:>12.4f} {:>9}\n", "treatment", a.ss_treatment,
                     a.df_treatment, a.ms_treatment, a.f_stat, format_p(a.p_value));
  out += fmt::format("{:<10} {:>15.2f} {:>4} {:>12.2f} {:>12} {:>9}\n", "error", a.ss_error, a.df_error, a.ms_error,
                     "-", "-");
  out += fmt::format("{:<10} {:>15.2f} {:>4} {:>12} {:>12} {:>9}\n", "total", a.ss_total,
                     a.df_treatment + a.df_error, "-", "-", "-");
  return out;
}

std::string to_string(Verdict v) { return v == Verdict::Significant ? "Significant" : "Insignificant"; }

std::string format_pairwise(std::span<const PairwiseResult> pairs) {
  std::string out = fmt::format("{:<16} {:>11} {:>9} {:>14} {:>14}\n", "Treatment pairs", "T-statistic", "raw p",
                                "Bonferroni", "Holm");
  for (const auto& p : pairs) {
    out += fmt::format("{:<16} {:>11.2f} {:>9} {:>14} {:>14}\n", fmt::format("{} Vs {}", p.reference_gap, p.other_gap),
                       p.t_stat, format_p(p.raw_p), to_string(p.bonferroni), to_string(p.holm));
  }
  if (!pairs.empty()) out += fmt::format("correction family size {}\n", pairs.front().family_size);
  return out;
}

void to_json(nlohmann::json& j, const SampleSummary& s) {
  j = nlohmann::json{{"gap_ms", s.gap_ms}, {"mean", s.mean}, {"sd", s.sd}, {"n", s.n}};
}

void to_json(nlohmann::json& j, const AnovaResult& a) {
  j = nlohmann::json{{"ss_treatment", a.ss_treatment}, {"ss_error", a.ss_error}, {"ss_total", a.ss_total},
                     {"df_treatment", a.df_treatment}, {"df_error", a.df_error},  {"ms_treatment", a.ms_treatment},
                     {"ms_error", a.ms_error},         {"f_stat", a.f_stat},      {"p_value", a.p_value}};
}

void to_json(nlohmann::json& j, const PairwiseResult& p) {
  j = nlohmann::json{{"reference_gap_ms", p.reference_gap},
                     {"other_gap_ms", p.other_gap},
                     {"t_stat", p.t_stat},
                     {"raw_p", p.raw_p},
                     {"bonferroni", to_string(p.bonferroni)},
                     {"holm", to_string(p.holm)},
                     {"family_size", p.family_size}};
}

}  // namespace brailleband
