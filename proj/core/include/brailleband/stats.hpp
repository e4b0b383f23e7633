#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace brailleband {

/// Reading accuracy for one character gap (treatment).
struct SampleSummary {
  int gap_ms;
  double mean;  // accuracy %
  double sd;    // sample standard deviation, %
  int n;

  /// Throws InvalidInput unless n >= 2, sd >= 0 and 0 <= mean <= 100.
  void validate() const;

  friend bool operator==(const SampleSummary&, const SampleSummary&) = default;
};

/// Reading accuracy from the original gap study: seven gaps, ten subjects each.
const std::vector<SampleSummary>& reading_speed_table();

struct AnovaResult {
  double ss_treatment;
  double ss_error;
  double ss_total;
  int df_treatment;
  int df_error;
  double ms_treatment;
  double ms_error;
  double f_stat;
  double p_value;
};

/// One-way independent-groups ANOVA from per-group (mean, sd, n). Throws
/// InvalidInput for fewer than two groups, DegenerateData when the error
/// mean square is zero.
AnovaResult anova_from_summary(std::span<const SampleSummary> groups);

/// Raw observations per treatment, keyed by gap in ms.
using RawData = std::map<int, std::vector<double>>;

SampleSummary summarize(int gap_ms, std::span<const double> values);

/// Summarizes each treatment and defers to anova_from_summary.
AnovaResult anova_from_raw(const RawData& data);

enum class Verdict { Insignificant, Significant };
enum class CorrectionFamily {
  AllPairs,       // every pair among the k treatments
  SelectedPairs,  // only pairs involving the reference
};

struct PairwiseOptions {
  double alpha = 0.05;
  CorrectionFamily family = CorrectionFamily::AllPairs;
};

struct PairwiseResult {
  int reference_gap;
  int other_gap;
  double t_stat;
  double raw_p;
  Verdict bonferroni;
  Verdict holm;
  int family_size;
};

/// |mean_a - mean_b| / sqrt(ms_error (1/n_a + 1/n_b)) and its two-sided p on
/// df_error degrees of freedom.
struct TStat {
  double t;
  double p;
};
TStat pairwise_t(const SampleSummary& a, const SampleSummary& b, const AnovaResult& anova);

/// Bonferroni and Holm verdicts for every treatment against `reference_gap`,
/// in input order. The correction family is chosen by `options.family`; Holm
/// ranks all p-values of that family and steps down until the first failure.
/// Throws UnknownReference.
std::vector<PairwiseResult> pairwise_vs_reference(std::span<const SampleSummary> groups,
                                                  int reference_gap, PairwiseOptions options = {});

/// Treatment with the highest mean, ties broken by smaller sd.
int best_treatment(std::span<const SampleSummary> groups);

/// Arithmetic mean of 0..10 usability ratings. Throws EmptyRatings.
double usability_mean(std::span<const double> ratings);

std::vector<SampleSummary> parse_summary_csv(const std::string& text);
RawData parse_raw_csv(const std::string& text);

std::string format_table_summaries(std::span<const SampleSummary> groups);
std::string format_anova(const AnovaResult& anova);
std::string format_pairwise(std::span<const PairwiseResult> pairs);

std::string to_string(Verdict v);
void to_json(nlohmann::json& j, const SampleSummary& s);
void to_json(nlohmann::json& j, const AnovaResult& a);
void to_json(nlohmann::json& j, const PairwiseResult& p);

}  // namespace brailleband
