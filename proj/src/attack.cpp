#include "uinfer/attack.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "uinfer/io.hpp"
#include "uinfer/parallel.hpp"
#include "uinfer/rng.hpp"

namespace uinfer {

std::string aggregation_name(Aggregation a) {
  switch (a) {
    case Aggregation::kMean: return "mean";
    case Aggregation::kMin: return "min";
    case Aggregation::kMax: return "max";
  }
  throw std::logic_error("unknown aggregation");
}

Aggregation aggregation_from_name(const std::string& name) {
  if (name == "mean") return Aggregation::kMean;
  if (name == "min") return Aggregation::kMin;
  if (name == "max") return Aggregation::kMax;
  throw std::invalid_argument("unknown aggregation \"" + name + "\" (want mean|min|max)");
}

Decision decide(const AttackScore& score, double threshold) {
  return Decision{score.user_id, threshold, score.statistic > threshold};
}

double doc_score(const Document& doc, const ScoringModel& target, const ScoringModel& ref,
                 bool length_normalize) {
  if (target.vocab_size() != ref.vocab_size())
    throw std::invalid_argument("target and reference vocabularies differ");
  double s = target.log_prob(doc.tokens) - ref.log_prob(doc.tokens);
  if (length_normalize) {
    size_t len = doc.tokens.size();
    if (const auto* ngram = dynamic_cast<const NGramModel*>(&target)) {
      len = ngram->effective_tokens(doc.tokens).size();
    } else if (const auto* fit = dynamic_cast<const FitStrengthModel*>(&target)) {
      len = fit->target().effective_tokens(doc.tokens).size();
    }
    if (len == 0) throw std::runtime_error("cannot length-normalize an empty document");
    s /= static_cast<double>(len);
  }
  return s;
}

AttackScore user_statistic(const std::string& user_id, const std::vector<const Document*>& docs,
                           const ScoringModel& target, const ScoringModel& ref,
                           Aggregation aggregation, bool length_normalize) {
  if (docs.empty()) throw std::invalid_argument("user_statistic: empty document set");
  AttackScore score;
  score.user_id = user_id;
  score.m = docs.size();
  score.aggregation = aggregation;
  score.per_doc.reserve(docs.size());
  for (const Document* doc : docs) {
    score.per_doc.push_back(doc_score(*doc, target, ref, length_normalize));
  }
  switch (aggregation) {
    case Aggregation::kMean: {
      double sum = 0.0;
      for (double v : score.per_doc) sum += v;
      score.statistic = sum / static_cast<double>(score.per_doc.size());
      break;
    }
    case Aggregation::kMin:
      score.statistic = *std::min_element(score.per_doc.begin(), score.per_doc.end());
      break;
    case Aggregation::kMax:
      score.statistic = *std::max_element(score.per_doc.begin(), score.per_doc.end());
      break;
  }
  return score;
}

std::vector<double> ScoredUsers::held_in_values() const {
  std::vector<double> v;
  v.reserve(held_in.size());
  for (const auto& s : held_in) v.push_back(s.statistic);
  return v;
}

std::vector<double> ScoredUsers::held_out_values() const {
  std::vector<double> v;
  v.reserve(held_out.size());
  for (const auto& s : held_out) v.push_back(s.statistic);
  return v;
}

ScoredUsers score_all_users(const Corpus& corpus, const SplitPlan& split,
                            const ScoringModel& target, const ScoringModel& ref,
                            Aggregation aggregation, std::optional<size_t> m_limit, uint64_t seed,
                            int jobs, bool length_normalize) {
  std::vector<std::string> users;
  users.reserve(split.held_in.size() + split.held_out.size());
  users.insert(users.end(), split.held_in.begin(), split.held_in.end());
  users.insert(users.end(), split.held_out.begin(), split.held_out.end());

  std::vector<AttackScore> scored(users.size());
  parallel_for(jobs, users.size(), [&](size_t i) {
    const std::string& uid = users[i];
    auto docs = attacker_docs_of_user(corpus, split, uid);
    if (docs.empty()) throw std::runtime_error("user \"" + uid + "\" has no attacker documents");
    if (m_limit && *m_limit < docs.size()) {
      Rng rng(derive_seed(seed, "attacker-subsample:" + uid));
      std::vector<const Document*> chosen;
      chosen.reserve(*m_limit);
      for (size_t k : rng.sample_without_replacement(docs.size(), *m_limit)) {
        chosen.push_back(docs[k]);
      }
      docs = std::move(chosen);
    }
    scored[i] = user_statistic(uid, docs, target, ref, aggregation, length_normalize);
  });

  ScoredUsers out;
  for (size_t i = 0; i < users.size(); ++i) {
    if (split.is_held_in(users[i])) {
      out.held_in.push_back(std::move(scored[i]));
    } else {
      out.held_out.push_back(std::move(scored[i]));
    }
  }
  auto by_user = [](const AttackScore& a, const AttackScore& b) { return a.user_id < b.user_id; };
  std::sort(out.held_in.begin(), out.held_in.end(), by_user);
  std::sort(out.held_out.begin(), out.held_out.end(), by_user);
  return out;
}

std::string scores_to_csv(const ScoredUsers& scores) {
  std::string csv = "user_id,held_in,m,statistic,aggregation\n";
  auto emit = [&csv](const AttackScore& s, int held_in) {
    csv += s.user_id;
    csv += ',';
    csv += std::to_string(held_in);
    csv += ',';
    csv += std::to_string(s.m);
    csv += ',';
    csv += float17(s.statistic);
    csv += ',';
    csv += aggregation_name(s.aggregation);
    csv += '\n';
  };
  for (const auto& s : scores.held_in) emit(s, 1);
  for (const auto& s : scores.held_out) emit(s, 0);
  return csv;
}

ScoredUsers scores_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line.rfind("user_id,", 0) != 0)
    throw std::runtime_error("scores CSV: missing header");
  ScoredUsers out;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5)
      throw std::runtime_error("scores CSV line " + std::to_string(line_no) + ": want 5 columns");
    AttackScore s;
    s.user_id = cells[0];
    s.m = std::stoull(cells[2]);
    s.statistic = std::stod(cells[3]);
    s.aggregation = aggregation_from_name(cells[4]);
    if (cells[1] == "1") {
      out.held_in.push_back(std::move(s));
    } else if (cells[1] == "0") {
      out.held_out.push_back(std::move(s));
    } else {
      throw std::runtime_error("scores CSV line " + std::to_string(line_no) +
                               ": held_in must be 0 or 1");
    }
  }
  return out;
}

}  // namespace uinfer
