#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uinfer/corpus.hpp"
#include "uinfer/ngram.hpp"

namespace uinfer {

enum class Aggregation { kMean, kMin, kMax };

std::string aggregation_name(Aggregation a);
Aggregation aggregation_from_name(const std::string& name);

// Per-user test statistic: the aggregation (mean by default) of
// per-document log-likelihood ratios over the m attacker documents.
struct AttackScore {
  std::string user_id;
  size_t m = 0;
  double statistic = 0.0;
  Aggregation aggregation = Aggregation::kMean;
  std::vector<double> per_doc;
};

struct Decision {
  std::string user_id;
  double threshold = 0.0;
  bool reject_null = false;  // statistic > threshold
};

Decision decide(const AttackScore& score, double threshold);

// log p_target(x) - log p_ref(x); divided by the scored token count iff
// length_normalize (off by default: only the document count normalizes
// the user statistic).
double doc_score(const Document& doc, const ScoringModel& target, const ScoringModel& ref,
                 bool length_normalize = false);

AttackScore user_statistic(const std::string& user_id, const std::vector<const Document*>& docs,
                           const ScoringModel& target, const ScoringModel& ref,
                           Aggregation aggregation, bool length_normalize = false);

struct ScoredUsers {
  std::vector<AttackScore> held_in;   // sorted by user_id
  std::vector<AttackScore> held_out;  // sorted by user_id

  std::vector<double> held_in_values() const;
  std::vector<double> held_out_values() const;
};

// Scores every user of the split on its attacker documents. With m_limit
// set, each user's attacker docs are subsampled (seeded per user) to
// min(m_limit, available).
ScoredUsers score_all_users(const Corpus& corpus, const SplitPlan& split,
                            const ScoringModel& target, const ScoringModel& ref,
                            Aggregation aggregation, std::optional<size_t> m_limit, uint64_t seed,
                            int jobs = 1, bool length_normalize = false);

// CSV with header user_id,held_in,m,statistic,aggregation.
std::string scores_to_csv(const ScoredUsers& scores);
ScoredUsers scores_from_csv(const std::string& csv);

}  // namespace uinfer
