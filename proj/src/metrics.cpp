#include "uinfer/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uinfer/io.hpp"
#include "uinfer/parallel.hpp"
#include "uinfer/rng.hpp"

namespace uinfer {

RocCurve roc_curve(std::span<const double> scores_in, std::span<const double> scores_out) {
  if (scores_in.empty() || scores_out.empty())
    throw std::invalid_argument("roc_curve: both score sets must be non-empty");

  std::vector<double> values(scores_in.begin(), scores_in.end());
  values.insert(values.end(), scores_out.begin(), scores_out.end());
  std::sort(values.begin(), values.end(), std::greater<double>());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  std::vector<double> in_sorted(scores_in.begin(), scores_in.end());
  std::vector<double> out_sorted(scores_out.begin(), scores_out.end());
  std::sort(in_sorted.begin(), in_sorted.end(), std::greater<double>());
  std::sort(out_sorted.begin(), out_sorted.end(), std::greater<double>());

  RocCurve curve;
  curve.thresholds.reserve(values.size() + 1);
  size_t in_above = 0, out_above = 0;  // counts with score > threshold
  for (double v : values) {
    while (in_above < in_sorted.size() && in_sorted[in_above] > v) ++in_above;
    while (out_above < out_sorted.size() && out_sorted[out_above] > v) ++out_above;
    curve.thresholds.push_back(v);
    curve.fpr.push_back(static_cast<double>(out_above) / static_cast<double>(out_sorted.size()));
    curve.tpr.push_back(static_cast<double>(in_above) / static_cast<double>(in_sorted.size()));
  }
  curve.thresholds.push_back(-std::numeric_limits<double>::infinity());
  curve.fpr.push_back(1.0);
  curve.tpr.push_back(1.0);
  return curve;
}

double auroc(std::span<const double> scores_in, std::span<const double> scores_out) {
  if (scores_in.empty() || scores_out.empty())
    throw std::invalid_argument("auroc: both score sets must be non-empty");
  std::vector<double> in_sorted(scores_in.begin(), scores_in.end());
  std::vector<double> out_sorted(scores_out.begin(), scores_out.end());
  std::sort(in_sorted.begin(), in_sorted.end());
  std::sort(out_sorted.begin(), out_sorted.end());

  // 2*#(in > out) + #(in == out), accumulated exactly in integers. Both
  // pointers only move forward because in_sorted is non-decreasing.
  uint64_t twice_wins = 0;
  size_t lo = 0, hi = 0;  // #out < v and #out <= v
  for (double v : in_sorted) {
    while (lo < out_sorted.size() && out_sorted[lo] < v) ++lo;
    if (hi < lo) hi = lo;
    while (hi < out_sorted.size() && out_sorted[hi] <= v) ++hi;
    twice_wins += 2 * static_cast<uint64_t>(lo) + static_cast<uint64_t>(hi - lo);
  }
  const double denom = 2.0 * static_cast<double>(in_sorted.size()) *
                       static_cast<double>(out_sorted.size());
  return static_cast<double>(twice_wins) / denom;
}

double tpr_at_fpr(const RocCurve& curve, double fpr_target) {
  if (fpr_target < 0.0 || fpr_target > 1.0)
    throw std::invalid_argument("fpr_target must be in [0,1]");
  double best = 0.0;
  for (size_t i = 0; i < curve.size(); ++i) {
    if (curve.fpr[i] <= fpr_target) best = std::max(best, curve.tpr[i]);
  }
  return best;
}

BootstrapSummary summarize_samples(std::span<const double> samples, uint64_t seed) {
  if (samples.empty()) throw std::invalid_argument("no samples to summarize");
  BootstrapSummary s;
  s.B = samples.size();
  s.seed = seed;
  s.degenerate = samples.size() == 1;
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / static_cast<double>(samples.size());
  double sq = 0.0;
  for (double v : samples) sq += (v - s.mean) * (v - s.mean);
  s.std_dev = std::sqrt(sq / static_cast<double>(samples.size()));
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  auto pick = [&sorted](double q) {
    const double exact = q * static_cast<double>(sorted.size());
    size_t rank = static_cast<size_t>(std::ceil(exact - 1e-12));
    rank = std::clamp<size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
  };
  s.ci_lo = pick(0.025);
  s.ci_hi = pick(0.975);
  return s;
}

BootstrapSummary bootstrap_auroc(std::span<const double> scores_in,
                                 std::span<const double> scores_out, size_t B, uint64_t seed,
                                 int jobs) {
  if (B < 1) throw std::invalid_argument("bootstrap_auroc: B must be >= 1");
  if (scores_in.empty() || scores_out.empty())
    throw std::invalid_argument("bootstrap_auroc: both score sets must be non-empty");
  std::vector<double> samples(B);
  parallel_for(jobs, B, [&](size_t b) {
    Rng rng(derive_seed(seed, "bootstrap", b));
    std::vector<double> in_re(scores_in.size());
    for (auto& v : in_re) v = scores_in[rng.index(scores_in.size())];
    std::vector<double> out_re(scores_out.size());
    for (auto& v : out_re) v = scores_out[rng.index(scores_out.size())];
    samples[b] = auroc(in_re, out_re);
  });
  return summarize_samples(samples, seed);
}

namespace {

std::vector<double> average_ranks(std::span<const double> xs) {
  const size_t n = xs.size();
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("spearman: size mismatch");
  if (xs.size() < 2) throw std::invalid_argument("spearman: need at least 2 points");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::runtime_error("undefined correlation: constant input sequence");
  return sxy / std::sqrt(sxx * syy);
}

double generalization_gap(const ScoringModel& target, const SplitPlan& split,
                          const Corpus& corpus) {
  const auto val_in = validation_docs(corpus, split, /*held_in_side=*/true);
  const auto val_out = validation_docs(corpus, split, /*held_in_side=*/false);
  if (val_in.empty() || val_out.empty())
    throw std::runtime_error("generalization_gap: missing validation docs on one side");
  return mean_nll_per_token(target, val_out) - mean_nll_per_token(target, val_in);
}

std::string roc_to_csv(const RocCurve& curve) {
  std::string csv = "threshold,fpr,tpr\n";
  for (size_t i = 0; i < curve.size(); ++i) {
    csv += float17(curve.thresholds[i]);
    csv += ',';
    csv += float17(curve.fpr[i]);
    csv += ',';
    csv += float17(curve.tpr[i]);
    csv += '\n';
  }
  return csv;
}

}  // namespace uinfer
