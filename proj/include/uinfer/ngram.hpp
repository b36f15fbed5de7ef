#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "uinfer/corpus.hpp"

namespace uinfer {

// Behavioral contract shared by local count models, interpolations and the
// remote provider: a sequence of in-vocab token ids maps to a total
// log-likelihood in nats.
class ScoringModel {
 public:
  virtual ~ScoringModel() = default;
  virtual double log_prob(std::span<const TokenId> tokens) const = 0;
  virtual uint32_t vocab_size() const = 0;
};

// Add-alpha n-gram model. Conditionals are
//   p(t | ctx) = (count(ctx,t) + alpha) / (count(ctx,*) + alpha * V)
// so every in-vocab token has positive probability and each conditional
// sums to one. Contexts are the previous order-1 symbols, padded with a
// begin marker. Counts are doubles: DP training releases noised
// (real-valued) counts through the same structure.
class NGramModel : public ScoringModel {
 public:
  // Begin-of-document marker; only ever appears inside contexts.
  static constexpr TokenId kBos = 0xFFFFFFFFu;

  NGramModel(int order, double alpha, uint32_t vocab_size, bool eos_enabled = true);

  // Accumulates counts for one document. With EOS disabled a trailing EOS
  // token is ignored.
  void add_document(std::span<const TokenId> tokens, const std::string& doc_id);
  void add_sequence(std::span<const TokenId> tokens);  // counts only, no doc bookkeeping
  void record_trained_on(const std::string& doc_id) { trained_on_.insert(doc_id); }

  double cond_prob(std::span<const TokenId> context, TokenId token) const;
  double log_prob(std::span<const TokenId> tokens) const override;
  uint32_t vocab_size() const override { return vocab_size_; }

  int order() const { return order_; }
  double alpha() const { return alpha_; }
  bool eos_enabled() const { return eos_enabled_; }
  const std::set<std::string>& trained_on() const { return trained_on_; }

  // Sorted (context, token) -> count view; also the serialization order.
  using CountsMap = std::map<std::vector<TokenId>, std::map<TokenId, double>>;
  const CountsMap& counts() const { return counts_; }
  void set_count(const std::vector<TokenId>& context, TokenId token, double count);
  double context_total(const std::vector<TokenId>& context) const;

  // Strips a trailing EOS when EOS scoring is off.
  std::span<const TokenId> effective_tokens(std::span<const TokenId> tokens) const;

 private:
  int order_;
  double alpha_;
  uint32_t vocab_size_;
  bool eos_enabled_;
  CountsMap counts_;
  std::map<std::vector<TokenId>, double> totals_;
  std::set<std::string> trained_on_;
};

// Convex per-token interpolation lambda*target + (1-lambda)*reference.
// Emulates a training trajectory: lambda 0 is the untouched reference,
// lambda 1 reproduces the fully fit target bit-for-bit.
class FitStrengthModel : public ScoringModel {
 public:
  FitStrengthModel(std::shared_ptr<const NGramModel> target,
                   std::shared_ptr<const NGramModel> reference, double lambda);

  double log_prob(std::span<const TokenId> tokens) const override;
  uint32_t vocab_size() const override { return target_->vocab_size(); }
  double lambda() const { return lambda_; }
  const NGramModel& target() const { return *target_; }
  const NGramModel& reference() const { return *reference_; }

 private:
  std::shared_ptr<const NGramModel> target_;
  std::shared_ptr<const NGramModel> reference_;
  double lambda_;
};

// --- training ----------------------------------------------------------------

// Counts accumulate over fine-tune docs of held-in users only.
NGramModel train_ngram(const Corpus& corpus, const SplitPlan& split, int order, double alpha,
                       bool eos_enabled = true);

NGramModel train_ngram_on_docs(const std::vector<const Document*>& docs, int order, double alpha,
                               uint32_t vocab_size, bool eos_enabled = true);

struct DpTrainConfig {
  double clip = 1.0;    // max L2 norm of one document's count increment
  double sigma = 0.0;   // Gaussian noise stddev per released count
  double delta = 1e-6;

  void validate() const;
};

struct DpTrainResult {
  NGramModel model;
  double epsilon = 0.0;
  std::string warning;  // empty when nothing to flag
};

// Count-based analogue of DP fine-tuning: per-document count increments
// are clipped to L2 norm <= clip, summed, and released once with
// N(0, sigma^2) noise per cell (clamped below at 0). Epsilon comes from
// one-shot zCDP: rho = (clip/sigma)^2 / 2, eps = rho + 2*sqrt(rho*ln(1/delta)).
DpTrainResult train_dp_ngram(const Corpus& corpus, const SplitPlan& split, int order, double alpha,
                             const DpTrainConfig& cfg, uint64_t seed);

double dp_epsilon(double clip, double sigma, double delta);
// Inverse of dp_epsilon in sigma for fixed clip/delta.
double dp_sigma_for_epsilon(double epsilon, double clip, double delta);

// --- evaluation ----------------------------------------------------------------

// -sum(log_prob) / sum(token count): per-token validation loss in nats.
double mean_nll_per_token(const ScoringModel& model, const std::vector<const Document*>& docs);

// --- serialization ---------------------------------------------------------------

// Directory layout: counts.bin (context-sorted records, little-endian
// 64-bit fields) + meta.json.
void save_model(const NGramModel& model, const std::filesystem::path& dir,
                const DpTrainConfig* dp = nullptr, double epsilon = 0.0);
NGramModel load_model(const std::filesystem::path& dir);

}  // namespace uinfer
