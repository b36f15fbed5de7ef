#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uinfer/corpus.hpp"
#include "uinfer/ngram.hpp"

namespace uinfer {

// Step ROC over all distinct thresholds, positives = held-in, predicted
// positive iff score > threshold. Starts at (0,0) (threshold = max score)
// and ends at (1,1) (threshold = -inf).
struct RocCurve {
  std::vector<double> thresholds;
  std::vector<double> fpr;
  std::vector<double> tpr;

  size_t size() const { return thresholds.size(); }
};

RocCurve roc_curve(std::span<const double> scores_in, std::span<const double> scores_out);

// Exact Mann-Whitney AUROC: P(S_in > S_out) + 0.5 * P(S_in = S_out).
double auroc(std::span<const double> scores_in, std::span<const double> scores_out);

// Max TPR among curve points with fpr <= fpr_target (step convention).
double tpr_at_fpr(const RocCurve& curve, double fpr_target);

struct BootstrapSummary {
  size_t B = 0;
  uint64_t seed = 0;
  double mean = 0.0;
  double std_dev = 0.0;   // population convention: B = 1 gives 0
  double ci_lo = 0.0;     // 2.5th percentile, nearest rank
  double ci_hi = 0.0;     // 97.5th percentile
  bool degenerate = false;  // flagged when B == 1
};

// Resamples users with replacement independently within each side; one
// AUROC per resample, per-iteration seeds derived from (seed, iteration).
BootstrapSummary bootstrap_auroc(std::span<const double> scores_in,
                                 std::span<const double> scores_out, size_t B, uint64_t seed,
                                 int jobs = 1);

// Summarizes an externally produced series with the same conventions.
BootstrapSummary summarize_samples(std::span<const double> samples, uint64_t seed);

// Spearman rank correlation, average ranks for ties; throws on constant
// input where the correlation is undefined.
double spearman(std::span<const double> xs, std::span<const double> ys);

// mean_nll(held-out users' validation docs) - mean_nll(held-in users'
// validation docs): the user-level overfitting signal.
double generalization_gap(const ScoringModel& target, const SplitPlan& split,
                          const Corpus& corpus);

// CSV with header threshold,fpr,tpr.
std::string roc_to_csv(const RocCurve& curve);

}  // namespace uinfer
