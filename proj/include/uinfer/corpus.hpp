#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace uinfer {

using TokenId = uint32_t;

// Token table with reserved ids. Ids are contiguous from 0; UNK and EOS
// always exist. Frozen once built: re-tokenizing against a frozen vocab
// never changes a document's token count.
struct Vocab {
  static constexpr TokenId kUnkId = 0;
  static constexpr TokenId kEosId = 1;

  std::vector<std::string> id_to_token;  // [0]="<unk>", [1]="<eos>"
  std::unordered_map<std::string, TokenId> token_to_id;

  uint32_t size() const { return static_cast<uint32_t>(id_to_token.size()); }
  TokenId lookup(const std::string& token) const;  // UNK for unknown tokens
  uint64_t hash() const;

  static Vocab reserved_only();
};

struct Document {
  std::string doc_id;
  std::string user_id;
  std::string text;
  std::vector<TokenId> tokens;  // ends with EOS once tokenized

  // Token count without the trailing EOS.
  size_t word_count() const;
};

struct UserRecord {
  std::string user_id;
  std::vector<Document> documents;
};

struct Corpus {
  std::map<std::string, UserRecord> users;  // keyed by user_id; map keeps iteration canonical
  Vocab vocab;
  bool tokenized = false;

  size_t n_users() const { return users.size(); }
  size_t n_documents() const;
  const Document* find_doc(const std::string& user_id, const std::string& doc_id) const;
  void check_invariants() const;  // doc_id uniqueness, per-doc user_id consistency
};

// Document-granular split. Fine-tune docs of a held-in user are the docs
// not reserved for the attacker or validation; held-out users' docs are
// never trained on.
struct SplitPlan {
  std::set<std::string> held_in;
  std::set<std::string> held_out;
  std::map<std::string, std::set<std::string>> attacker_docs;
  std::map<std::string, std::set<std::string>> validation_docs;
  uint64_t seed = 0;

  bool is_held_in(const std::string& user_id) const { return held_in.count(user_id) > 0; }
  bool is_reserved(const std::string& user_id, const std::string& doc_id) const;
};

std::vector<const Document*> fine_tune_docs(const Corpus& corpus, const SplitPlan& split);
std::vector<const Document*> fine_tune_docs_of_user(const Corpus& corpus, const SplitPlan& split,
                                                    const std::string& user_id);
std::vector<const Document*> attacker_docs_of_user(const Corpus& corpus, const SplitPlan& split,
                                                   const std::string& user_id);
std::vector<const Document*> validation_docs(const Corpus& corpus, const SplitPlan& split,
                                             bool held_in_side);

// --- tokenization ---------------------------------------------------------

// Word-level split: whitespace separates tokens and each ASCII punctuation
// character is a token of its own ("don't stop" -> don, ', t, stop).
// Bytes >= 0x80 count as word characters so UTF-8 sequences stay intact.
std::vector<std::string> word_tokenize(std::string_view text);

struct IngestResult {
  Corpus corpus;
  size_t skipped_empty = 0;  // lines with empty "text"
};

// One JSON object per line with string fields "user" and "text" and an
// optional "id"; doc_ids default to the 1-based line number.
IngestResult ingest_jsonl(const std::filesystem::path& path);

struct TokenizeResult {
  Corpus corpus;
  size_t dropped_docs = 0;  // documents that tokenized to only EOS
  size_t removed_users = 0;
};

TokenizeResult build_vocab_and_tokenize(const Corpus& corpus, size_t min_token_freq);

// --- filtering / dedup / caps ---------------------------------------------

struct FilterReport {
  std::vector<std::string> removed_users;
};

std::pair<Corpus, FilterReport> filter_min_docs(const Corpus& corpus, size_t min_docs);

struct DedupReport {
  std::map<std::string, size_t> removed_per_user;
  std::vector<std::pair<std::string, size_t>> top_duplicates;  // (text, extra copies), descending
  size_t total_removed = 0;
};

// Removes exact within-user text duplicates, keeping the first occurrence.
// Duplicates shared across users are deliberately untouched.
std::pair<Corpus, DedupReport> dedup_within_user(const Corpus& corpus);

Corpus cap_per_user(const Corpus& corpus, size_t cap, uint64_t seed);

// Repeats every document `factor` times within its user (ids suffixed
// "#dupK"). Used to study the dedup mitigation on corpora that have no
// natural duplicates.
Corpus inject_duplicates(const Corpus& corpus, size_t factor);

// --- split -----------------------------------------------------------------

// Users partitioned by a seeded shuffle at held_in_frac; every user (both
// sides) reserves attacker and validation docs. `force_held_in` users skip
// the shuffle and always land held-in (used for canary injection).
SplitPlan make_split(const Corpus& corpus, double held_in_frac, double attacker_frac,
                     double validation_frac, uint64_t seed,
                     const std::set<std::string>& force_held_in = {});

// --- summary stats ----------------------------------------------------------

struct CorpusStats {
  size_t n_users = 0;
  size_t n_examples = 0;
  // Nearest-rank percentiles of examples-per-user.
  size_t p0 = 0, p25 = 0, p50 = 0, p75 = 0, p100 = 0;
};

CorpusStats summary_stats(const Corpus& corpus);

// Nearest-rank percentile on sorted data; q in [0,100].
size_t nearest_rank_percentile(const std::vector<size_t>& sorted_counts, double q);

// --- synthetic corpora ------------------------------------------------------

struct SyntheticUserSpec {
  size_t n_users = 0;
  size_t docs_per_user_min = 0, docs_per_user_max = 0;
  size_t doc_len_min = 0, doc_len_max = 0;  // words per doc, before EOS
  std::vector<double> base_dist;            // over word types w0..w{V-1}
  double perturbation = 0;                  // per-user Dirichlet concentration multiplier
  size_t signature_len = 0;                 // 0 disables signatures
  double signature_prob = 0.0;

  void validate() const;
};

// Per-user distribution ~ Dirichlet(perturbation * base_dist); docs are
// i.i.d. token draws, with the user's signature (if enabled) spliced in at
// a random boundary with probability signature_prob.
Corpus generate_synthetic_corpus(const SyntheticUserSpec& spec, uint64_t seed);

// --- on-disk corpus layout: vocab.tsv + docs.jsonl (+ split.json) ----------

void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);
Corpus load_corpus(const std::filesystem::path& dir);
void save_split(const SplitPlan& split, const std::filesystem::path& file);
SplitPlan load_split(const std::filesystem::path& file);

}  // namespace uinfer
