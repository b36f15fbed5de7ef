#include "uinfer/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "uinfer/io.hpp"
#include "uinfer/rng.hpp"

namespace uinfer {

namespace {

constexpr const char* kUnkToken = "<unk>";
constexpr const char* kEosToken = "<eos>";

}  // namespace

Vocab Vocab::reserved_only() {
  Vocab v;
  v.id_to_token = {kUnkToken, kEosToken};
  v.token_to_id = {{kUnkToken, kUnkId}, {kEosToken, kEosId}};
  return v;
}

TokenId Vocab::lookup(const std::string& token) const {
  auto it = token_to_id.find(token);
  return it == token_to_id.end() ? kUnkId : it->second;
}

uint64_t Vocab::hash() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : id_to_token) {
    h = splitmix64(h ^ fnv1a64(t));
  }
  return h;
}

size_t Document::word_count() const {
  if (!tokens.empty() && tokens.back() == Vocab::kEosId) return tokens.size() - 1;
  return tokens.size();
}

size_t Corpus::n_documents() const {
  size_t n = 0;
  for (const auto& [_, user] : users) n += user.documents.size();
  return n;
}

const Document* Corpus::find_doc(const std::string& user_id, const std::string& doc_id) const {
  auto it = users.find(user_id);
  if (it == users.end()) return nullptr;
  for (const auto& doc : it->second.documents) {
    if (doc.doc_id == doc_id) return &doc;
  }
  return nullptr;
}

void Corpus::check_invariants() const {
  std::set<std::string> seen_ids;
  for (const auto& [uid, user] : users) {
    if (user.documents.empty()) throw std::runtime_error("user without documents: " + uid);
    if (user.user_id != uid) throw std::runtime_error("user_id mismatch for " + uid);
    for (const auto& doc : user.documents) {
      if (doc.user_id != uid)
        throw std::runtime_error("document " + doc.doc_id + " carries wrong user_id");
      if (!seen_ids.insert(doc.doc_id).second)
        throw std::runtime_error("duplicate doc_id: " + doc.doc_id);
      if (tokenized) {
        if (doc.tokens.empty()) throw std::runtime_error("empty token sequence: " + doc.doc_id);
        for (TokenId t : doc.tokens) {
          if (t >= vocab.size())
            throw std::runtime_error("token id out of range in doc " + doc.doc_id);
        }
      }
    }
  }
}

bool SplitPlan::is_reserved(const std::string& user_id, const std::string& doc_id) const {
  auto a = attacker_docs.find(user_id);
  if (a != attacker_docs.end() && a->second.count(doc_id)) return true;
  auto v = validation_docs.find(user_id);
  if (v != validation_docs.end() && v->second.count(doc_id)) return true;
  return false;
}

std::vector<const Document*> fine_tune_docs_of_user(const Corpus& corpus, const SplitPlan& split,
                                                    const std::string& user_id) {
  std::vector<const Document*> out;
  auto it = corpus.users.find(user_id);
  if (it == corpus.users.end()) return out;
  for (const auto& doc : it->second.documents) {
    if (!split.is_reserved(user_id, doc.doc_id)) out.push_back(&doc);
  }
  return out;
}

std::vector<const Document*> fine_tune_docs(const Corpus& corpus, const SplitPlan& split) {
  std::vector<const Document*> out;
  for (const auto& uid : split.held_in) {
    auto docs = fine_tune_docs_of_user(corpus, split, uid);
    out.insert(out.end(), docs.begin(), docs.end());
  }
  return out;
}

std::vector<const Document*> attacker_docs_of_user(const Corpus& corpus, const SplitPlan& split,
                                                   const std::string& user_id) {
  std::vector<const Document*> out;
  auto u = corpus.users.find(user_id);
  auto a = split.attacker_docs.find(user_id);
  if (u == corpus.users.end() || a == split.attacker_docs.end()) return out;
  for (const auto& doc : u->second.documents) {
    if (a->second.count(doc.doc_id)) out.push_back(&doc);
  }
  return out;
}

std::vector<const Document*> validation_docs(const Corpus& corpus, const SplitPlan& split,
                                             bool held_in_side) {
  std::vector<const Document*> out;
  const auto& side = held_in_side ? split.held_in : split.held_out;
  for (const auto& uid : side) {
    auto u = corpus.users.find(uid);
    auto v = split.validation_docs.find(uid);
    if (u == corpus.users.end() || v == split.validation_docs.end()) continue;
    for (const auto& doc : u->second.documents) {
      if (v->second.count(doc.doc_id)) out.push_back(&doc);
    }
  }
  return out;
}

// --- tokenization -----------------------------------------------------------

std::vector<std::string> word_tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (unsigned char c : text) {
    if (c < 0x80 && std::isspace(c)) {
      if (!current.empty()) {
        out.push_back(std::move(current));
        current.clear();
      }
    } else if (c < 0x80 && std::ispunct(c)) {
      if (!current.empty()) {
        out.push_back(std::move(current));
        current.clear();
      }
      out.emplace_back(1, static_cast<char>(c));
    } else {
      current += static_cast<char>(c);
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

IngestResult ingest_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path.string());

  IngestResult result;
  std::set<std::string> seen_ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(where + ": malformed JSON: " + e.what());
    }
    if (!obj.is_object()) throw std::runtime_error(where + ": not a JSON object");
    if (!obj.contains("user") || !obj["user"].is_string())
      throw std::runtime_error(where + ": missing field \"user\"");
    if (!obj.contains("text") || !obj["text"].is_string())
      throw std::runtime_error(where + ": missing field \"text\"");

    const std::string user = obj["user"].get<std::string>();
    const std::string text = obj["text"].get<std::string>();
    if (text.empty()) {
      ++result.skipped_empty;
      continue;
    }
    std::string doc_id = std::to_string(line_no);
    if (obj.contains("id")) {
      if (!obj["id"].is_string()) throw std::runtime_error(where + ": field \"id\" must be a string");
      doc_id = obj["id"].get<std::string>();
    }
    if (!seen_ids.insert(doc_id).second)
      throw std::runtime_error(where + ": duplicate doc id \"" + doc_id + "\"");

    auto& user_rec = result.corpus.users[user];
    user_rec.user_id = user;
    user_rec.documents.push_back(Document{doc_id, user, text, {}});
  }
  result.corpus.vocab = Vocab::reserved_only();
  result.corpus.tokenized = false;
  return result;
}

TokenizeResult build_vocab_and_tokenize(const Corpus& corpus, size_t min_token_freq) {
  if (corpus.tokenized) throw std::invalid_argument("corpus is already tokenized");

  std::map<std::string, size_t> freqs;  // ordered: ties broken lexicographically below
  for (const auto& [_, user] : corpus.users) {
    for (const auto& doc : user.documents) {
      for (auto& tok : word_tokenize(doc.text)) ++freqs[tok];
    }
  }

  std::vector<std::pair<std::string, size_t>> kept;
  for (const auto& [tok, n] : freqs) {
    if (n >= min_token_freq) kept.emplace_back(tok, n);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  TokenizeResult result;
  Vocab vocab = Vocab::reserved_only();
  for (auto& [tok, _] : kept) {
    vocab.token_to_id.emplace(tok, vocab.size());
    vocab.id_to_token.push_back(tok);
  }

  result.corpus.vocab = vocab;
  result.corpus.tokenized = true;
  for (const auto& [uid, user] : corpus.users) {
    UserRecord rec;
    rec.user_id = uid;
    for (const auto& doc : user.documents) {
      auto words = word_tokenize(doc.text);
      if (words.empty()) {
        ++result.dropped_docs;
        continue;
      }
      Document d = doc;
      d.tokens.clear();
      d.tokens.reserve(words.size() + 1);
      for (const auto& w : words) d.tokens.push_back(vocab.lookup(w));
      d.tokens.push_back(Vocab::kEosId);
      rec.documents.push_back(std::move(d));
    }
    if (rec.documents.empty()) {
      ++result.removed_users;
      continue;
    }
    result.corpus.users.emplace(uid, std::move(rec));
  }
  return result;
}

// --- filtering / dedup / caps ----------------------------------------------

std::pair<Corpus, FilterReport> filter_min_docs(const Corpus& corpus, size_t min_docs) {
  Corpus out;
  out.vocab = corpus.vocab;
  out.tokenized = corpus.tokenized;
  FilterReport report;
  for (const auto& [uid, user] : corpus.users) {
    if (user.documents.size() < min_docs) {
      report.removed_users.push_back(uid);
    } else {
      out.users.emplace(uid, user);
    }
  }
  if (out.users.empty()) throw std::runtime_error("empty corpus after filtering");
  return {std::move(out), std::move(report)};
}

std::pair<Corpus, DedupReport> dedup_within_user(const Corpus& corpus) {
  Corpus out;
  out.vocab = corpus.vocab;
  out.tokenized = corpus.tokenized;
  DedupReport report;
  std::map<std::string, size_t> dup_counts;
  for (const auto& [uid, user] : corpus.users) {
    UserRecord rec;
    rec.user_id = uid;
    std::set<std::string> seen;
    size_t removed = 0;
    for (const auto& doc : user.documents) {
      if (seen.insert(doc.text).second) {
        rec.documents.push_back(doc);
      } else {
        ++removed;
        ++dup_counts[doc.text];
      }
    }
    if (removed > 0) report.removed_per_user[uid] = removed;
    report.total_removed += removed;
    out.users.emplace(uid, std::move(rec));
  }
  report.top_duplicates.assign(dup_counts.begin(), dup_counts.end());
  std::stable_sort(report.top_duplicates.begin(), report.top_duplicates.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (report.top_duplicates.size() > 10) report.top_duplicates.resize(10);
  return {std::move(out), std::move(report)};
}

Corpus cap_per_user(const Corpus& corpus, size_t cap, uint64_t seed) {
  if (cap < 1) throw std::invalid_argument("cap must be >= 1");
  Corpus out;
  out.vocab = corpus.vocab;
  out.tokenized = corpus.tokenized;
  for (const auto& [uid, user] : corpus.users) {
    UserRecord rec;
    rec.user_id = uid;
    const size_t n = user.documents.size();
    if (n <= cap) {
      rec.documents = user.documents;
    } else {
      Rng rng(derive_seed(seed, "cap:" + uid));
      for (size_t i : rng.sample_without_replacement(n, cap)) {
        rec.documents.push_back(user.documents[i]);
      }
    }
    out.users.emplace(uid, std::move(rec));
  }
  return out;
}

Corpus inject_duplicates(const Corpus& corpus, size_t factor) {
  if (factor < 1) throw std::invalid_argument("duplication factor must be >= 1");
  if (factor == 1) return corpus;
  Corpus out;
  out.vocab = corpus.vocab;
  out.tokenized = corpus.tokenized;
  for (const auto& [uid, user] : corpus.users) {
    UserRecord rec;
    rec.user_id = uid;
    for (const auto& doc : user.documents) {
      rec.documents.push_back(doc);
      for (size_t k = 1; k < factor; ++k) {
        Document copy = doc;
        copy.doc_id = doc.doc_id + "#dup" + std::to_string(k);
        rec.documents.push_back(std::move(copy));
      }
    }
    out.users.emplace(uid, std::move(rec));
  }
  return out;
}

// --- split -------------------------------------------------------------------

SplitPlan make_split(const Corpus& corpus, double held_in_frac, double attacker_frac,
                     double validation_frac, uint64_t seed,
                     const std::set<std::string>& force_held_in) {
  if (!(held_in_frac > 0.0 && held_in_frac < 1.0))
    throw std::invalid_argument("held_in_frac must be in (0,1)");
  if (!(attacker_frac > 0.0 && attacker_frac < 1.0))
    throw std::invalid_argument("attacker_frac must be in (0,1)");
  if (!(validation_frac >= 0.0 && validation_frac < 1.0))
    throw std::invalid_argument("validation_frac must be in [0,1)");
  if (!(attacker_frac + validation_frac < 1.0))
    throw std::invalid_argument("attacker_frac + validation_frac must be < 1");

  std::vector<std::string> shuffled;
  for (const auto& [uid, _] : corpus.users) {
    if (force_held_in.count(uid)) continue;
    shuffled.push_back(uid);
  }
  if (shuffled.size() < 2)
    throw std::runtime_error("need at least 2 users outside force_held_in to split");

  SplitPlan split;
  split.seed = seed;
  for (const auto& uid : force_held_in) {
    if (!corpus.users.count(uid))
      throw std::invalid_argument("force_held_in user not in corpus: " + uid);
    split.held_in.insert(uid);
  }

  Rng rng(derive_seed(seed, "partition"));
  rng.shuffle(shuffled);
  size_t n_in = static_cast<size_t>(std::llround(held_in_frac * static_cast<double>(shuffled.size())));
  n_in = std::clamp<size_t>(n_in, 1, shuffled.size() - 1);
  for (size_t i = 0; i < shuffled.size(); ++i) {
    if (i < n_in) {
      split.held_in.insert(shuffled[i]);
    } else {
      split.held_out.insert(shuffled[i]);
    }
  }

  for (const auto& [uid, user] : corpus.users) {
    const size_t n = user.documents.size();
    const size_t a_n = std::max<size_t>(
        1, static_cast<size_t>(std::llround(attacker_frac * static_cast<double>(n))));
    const size_t v_n =
        validation_frac > 0.0
            ? std::max<size_t>(
                  1, static_cast<size_t>(std::llround(validation_frac * static_cast<double>(n))))
            : 0;
    if (a_n + v_n > n)
      throw std::runtime_error("user \"" + uid +
                               "\" has too few documents to reserve attacker/validation sets");

    std::vector<size_t> perm(n);
    for (size_t i = 0; i < n; ++i) perm[i] = i;
    Rng user_rng(derive_seed(seed, "reserve:" + uid));
    user_rng.shuffle(perm);
    auto& att = split.attacker_docs[uid];
    auto& val = split.validation_docs[uid];
    for (size_t i = 0; i < a_n; ++i) att.insert(user.documents[perm[i]].doc_id);
    for (size_t i = a_n; i < a_n + v_n; ++i) val.insert(user.documents[perm[i]].doc_id);
  }
  return split;
}

// --- summary stats ------------------------------------------------------------

size_t nearest_rank_percentile(const std::vector<size_t>& sorted_counts, double q) {
  if (sorted_counts.empty()) throw std::invalid_argument("percentile of empty data");
  if (q <= 0.0) return sorted_counts.front();
  const double exact = q / 100.0 * static_cast<double>(sorted_counts.size());
  size_t rank = static_cast<size_t>(std::ceil(exact - 1e-12));
  rank = std::clamp<size_t>(rank, 1, sorted_counts.size());
  return sorted_counts[rank - 1];
}

CorpusStats summary_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.n_users = corpus.users.size();
  std::vector<size_t> counts;
  counts.reserve(corpus.users.size());
  for (const auto& [_, user] : corpus.users) {
    counts.push_back(user.documents.size());
    stats.n_examples += user.documents.size();
  }
  if (counts.empty()) return stats;
  std::sort(counts.begin(), counts.end());
  stats.p0 = nearest_rank_percentile(counts, 0);
  stats.p25 = nearest_rank_percentile(counts, 25);
  stats.p50 = nearest_rank_percentile(counts, 50);
  stats.p75 = nearest_rank_percentile(counts, 75);
  stats.p100 = nearest_rank_percentile(counts, 100);
  return stats;
}

// --- synthetic corpora ----------------------------------------------------------

void SyntheticUserSpec::validate() const {
  if (n_users == 0) throw std::invalid_argument("n_users must be positive");
  if (docs_per_user_min < 1 || docs_per_user_min > docs_per_user_max)
    throw std::invalid_argument("docs_per_user range is empty");
  if (doc_len_min < 1 || doc_len_min > doc_len_max)
    throw std::invalid_argument("doc_len range is empty");
  if (base_dist.empty()) throw std::invalid_argument("base_dist is empty");
  double total = 0.0;
  for (double p : base_dist) {
    if (p < 0.0) throw std::invalid_argument("base_dist has negative entries");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("base_dist must sum to 1 within 1e-12");
  if (!(perturbation > 0.0)) throw std::invalid_argument("perturbation must be positive");
  if (signature_prob < 0.0 || signature_prob > 1.0)
    throw std::invalid_argument("signature probability must be in [0,1]");
  if (signature_len > 0 && signature_prob == 0.0)
    throw std::invalid_argument("signature_len set but signature_prob is 0");
}

Corpus generate_synthetic_corpus(const SyntheticUserSpec& spec, uint64_t seed) {
  spec.validate();
  const size_t n_words = spec.base_dist.size();

  Corpus corpus;
  corpus.tokenized = true;
  corpus.vocab = Vocab::reserved_only();
  for (size_t i = 0; i < n_words; ++i) {
    std::string tok = "w" + std::to_string(i);
    corpus.vocab.token_to_id.emplace(tok, corpus.vocab.size());
    corpus.vocab.id_to_token.push_back(tok);
  }

  int width = 1;
  for (size_t v = spec.n_users > 0 ? spec.n_users - 1 : 0; v >= 10; v /= 10) ++width;

  std::vector<double> concentration(n_words);
  for (size_t i = 0; i < n_words; ++i) concentration[i] = spec.perturbation * spec.base_dist[i];

  std::set<std::vector<TokenId>> used_signatures;
  for (size_t ui = 0; ui < spec.n_users; ++ui) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "u%0*zu", width, ui);
    const std::string uid = buf;
    Rng rng(derive_seed(seed, "user:" + uid));

    const std::vector<double> theta = rng.dirichlet(concentration);

    std::vector<TokenId> signature;
    if (spec.signature_len > 0) {
      for (int attempt = 0; attempt < 1000; ++attempt) {
        signature.clear();
        for (size_t t = 0; t < spec.signature_len; ++t) {
          signature.push_back(static_cast<TokenId>(2 + rng.discrete(spec.base_dist)));
        }
        if (used_signatures.insert(signature).second) break;
        if (attempt == 999) throw std::runtime_error("could not draw a unique user signature");
      }
    }

    UserRecord rec;
    rec.user_id = uid;
    const size_t n_docs =
        spec.docs_per_user_min + rng.index(spec.docs_per_user_max - spec.docs_per_user_min + 1);
    for (size_t di = 0; di < n_docs; ++di) {
      const size_t len = spec.doc_len_min + rng.index(spec.doc_len_max - spec.doc_len_min + 1);
      std::vector<TokenId> words;
      words.reserve(len + spec.signature_len);
      for (size_t t = 0; t < len; ++t) {
        words.push_back(static_cast<TokenId>(2 + rng.discrete(theta)));
      }
      if (!signature.empty() && rng.uniform() < spec.signature_prob) {
        const size_t at = rng.index(words.size() + 1);
        words.insert(words.begin() + static_cast<ptrdiff_t>(at), signature.begin(),
                     signature.end());
      }
      Document doc;
      doc.doc_id = uid + "-" + std::to_string(di);
      doc.user_id = uid;
      std::string text;
      for (size_t t = 0; t < words.size(); ++t) {
        if (t > 0) text += ' ';
        text += corpus.vocab.id_to_token[words[t]];
      }
      doc.text = std::move(text);
      doc.tokens = std::move(words);
      doc.tokens.push_back(Vocab::kEosId);
      rec.documents.push_back(std::move(doc));
    }
    corpus.users.emplace(uid, std::move(rec));
  }
  return corpus;
}

// --- on-disk corpus layout -------------------------------------------------------

void save_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::string vocab_tsv;
    for (size_t i = 0; i < corpus.vocab.id_to_token.size(); ++i) {
      vocab_tsv += corpus.vocab.id_to_token[i];
      vocab_tsv += '\t';
      vocab_tsv += std::to_string(i);
      vocab_tsv += '\n';
    }
    write_file(dir / "vocab.tsv", vocab_tsv);
  }
  {
    std::string docs;
    for (const auto& [_, user] : corpus.users) {
      for (const auto& doc : user.documents) {
        JsonWriter w;
        w.begin_object().kv("id", doc.doc_id).kv("user", doc.user_id).kv("text", doc.text);
        w.key("tokens").begin_array();
        for (TokenId t : doc.tokens) w.value(static_cast<uint64_t>(t));
        w.end_array().end_object();
        docs += w.str();
        docs += '\n';
      }
    }
    write_file(dir / "docs.jsonl", docs);
  }
}

Corpus load_corpus(const std::filesystem::path& dir) {
  Corpus corpus;
  {
    std::ifstream in(dir / "vocab.tsv");
    if (!in) throw std::runtime_error("cannot open " + (dir / "vocab.tsv").string());
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw std::runtime_error("malformed vocab.tsv line: " + line);
      const std::string tok = line.substr(0, tab);
      const uint32_t id = static_cast<uint32_t>(std::stoul(line.substr(tab + 1)));
      if (id != corpus.vocab.id_to_token.size())
        throw std::runtime_error("vocab.tsv ids must be contiguous from 0");
      corpus.vocab.token_to_id.emplace(tok, id);
      corpus.vocab.id_to_token.push_back(tok);
    }
    if (corpus.vocab.size() < 2) throw std::runtime_error("vocab.tsv missing reserved tokens");
  }
  {
    std::ifstream in(dir / "docs.jsonl");
    if (!in) throw std::runtime_error("cannot open " + (dir / "docs.jsonl").string());
    std::string line;
    size_t line_no = 0;
    bool any_tokens = false;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("docs.jsonl line " + std::to_string(line_no) + ": " + e.what());
      }
      Document doc;
      doc.doc_id = obj.at("id").get<std::string>();
      doc.user_id = obj.at("user").get<std::string>();
      doc.text = obj.at("text").get<std::string>();
      for (const auto& t : obj.at("tokens")) doc.tokens.push_back(t.get<TokenId>());
      if (!doc.tokens.empty()) any_tokens = true;
      auto& rec = corpus.users[doc.user_id];
      rec.user_id = doc.user_id;
      rec.documents.push_back(std::move(doc));
    }
    corpus.tokenized = any_tokens;
  }
  corpus.check_invariants();
  return corpus;
}

void save_split(const SplitPlan& split, const std::filesystem::path& file) {
  JsonWriter w;
  w.begin_object();
  w.kv("seed", split.seed);
  auto write_side = [&](const char* name, const std::set<std::string>& side) {
    w.key(name).begin_array();
    for (const auto& uid : side) w.value(uid);
    w.end_array();
  };
  write_side("held_in", split.held_in);
  write_side("held_out", split.held_out);
  auto write_docmap = [&](const char* name,
                          const std::map<std::string, std::set<std::string>>& m) {
    w.key(name).begin_object();
    for (const auto& [uid, ids] : m) {
      w.key(uid).begin_array();
      for (const auto& id : ids) w.value(id);
      w.end_array();
    }
    w.end_object();
  };
  write_docmap("attacker_docs", split.attacker_docs);
  write_docmap("validation_docs", split.validation_docs);
  w.end_object();
  write_file(file, w.str() + "\n");
}

SplitPlan load_split(const std::filesystem::path& file) {
  nlohmann::json obj = nlohmann::json::parse(read_file(file));
  SplitPlan split;
  split.seed = obj.at("seed").get<uint64_t>();
  for (const auto& uid : obj.at("held_in")) split.held_in.insert(uid.get<std::string>());
  for (const auto& uid : obj.at("held_out")) split.held_out.insert(uid.get<std::string>());
  for (const auto& [uid, ids] : obj.at("attacker_docs").items()) {
    for (const auto& id : ids) split.attacker_docs[uid].insert(id.get<std::string>());
  }
  for (const auto& [uid, ids] : obj.at("validation_docs").items()) {
    for (const auto& id : ids) split.validation_docs[uid].insert(id.get<std::string>());
  }
  return split;
}

}  // namespace uinfer
