#include "uinfer/canary.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

#include "uinfer/io.hpp"
#include "uinfer/rng.hpp"

namespace uinfer {

void CanarySpec::validate() const {
  if (lengths.empty()) throw std::invalid_argument("canary spec has no lengths");
  for (size_t l : lengths) {
    if (l < 1) throw std::invalid_argument("canary substring length must be >= 1");
  }
  if (per_length < 1) throw std::invalid_argument("per_length must be >= 1");
}

namespace {

std::string rebuild_text(const Corpus& corpus, const std::vector<TokenId>& words) {
  std::string text;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i > 0) text += ' ';
    text += corpus.vocab.id_to_token[words[i]];
  }
  return text;
}

}  // namespace

CanaryResult make_canaries(const Corpus& corpus, const CanarySpec& spec) {
  spec.validate();
  if (!corpus.tokenized) throw std::invalid_argument("make_canaries needs a tokenized corpus");
  if (spec.total() > corpus.users.size())
    throw std::invalid_argument("more canaries requested than real users available");

  std::vector<std::string> pool;
  for (const auto& [uid, _] : corpus.users) pool.push_back(uid);

  Rng rng(derive_seed(spec.seed, "canary"));
  CanaryResult result;
  result.corpus.vocab = corpus.vocab;
  result.corpus.tokenized = true;

  std::set<std::string> consumed;
  size_t counter = 0;
  for (size_t l : spec.lengths) {
    for (size_t i = 0; i < spec.per_length; ++i) {
      std::vector<std::string> eligible;
      for (const auto& uid : pool) {
        const auto& docs = corpus.users.at(uid).documents;
        const bool ok = std::any_of(docs.begin(), docs.end(),
                                    [l](const Document& d) { return d.word_count() >= l; });
        if (ok) eligible.push_back(uid);
      }
      if (eligible.empty())
        throw std::runtime_error("no eligible base user for canary length " + std::to_string(l));

      const std::string base = eligible[rng.index(eligible.size())];
      pool.erase(std::find(pool.begin(), pool.end(), base));
      consumed.insert(base);

      const auto& base_docs = corpus.users.at(base).documents;
      std::vector<size_t> long_enough;
      for (size_t d = 0; d < base_docs.size(); ++d) {
        if (base_docs[d].word_count() >= l) long_enough.push_back(d);
      }
      const Document& source = base_docs[long_enough[rng.index(long_enough.size())]];
      const size_t start = rng.index(source.word_count() - l + 1);
      std::vector<TokenId> substring(source.tokens.begin() + static_cast<ptrdiff_t>(start),
                                     source.tokens.begin() + static_cast<ptrdiff_t>(start + l));

      CanaryUser canary;
      canary.base_user_id = base;
      canary.canary_user_id = "canary" + std::to_string(counter++) + "_l" + std::to_string(l);
      canary.length = l;
      canary.substring = substring;

      UserRecord rec;
      rec.user_id = canary.canary_user_id;
      for (const Document& doc : base_docs) {
        std::vector<TokenId> words(doc.tokens.begin(),
                                   doc.tokens.begin() + static_cast<ptrdiff_t>(doc.word_count()));
        const size_t at = rng.index(words.size() + 1);
        words.insert(words.begin() + static_cast<ptrdiff_t>(at), substring.begin(),
                     substring.end());
        Document modified;
        modified.doc_id = doc.doc_id;
        modified.user_id = canary.canary_user_id;
        modified.text = rebuild_text(corpus, words);
        modified.tokens = std::move(words);
        modified.tokens.push_back(Vocab::kEosId);
        rec.documents.push_back(std::move(modified));
      }
      result.corpus.users.emplace(canary.canary_user_id, std::move(rec));
      result.registry.push_back(std::move(canary));
    }
  }

  for (const auto& [uid, user] : corpus.users) {
    if (!consumed.count(uid)) result.corpus.users.emplace(uid, user);
  }
  return result;
}

Corpus canary_data_limit(const Corpus& corpus, const SplitPlan& split,
                         const std::vector<CanaryUser>& registry, size_t docs_per_canary,
                         uint64_t seed) {
  if (docs_per_canary < 1) throw std::invalid_argument("docs_per_canary must be >= 1");
  std::set<std::string> canary_ids;
  for (const auto& c : registry) canary_ids.insert(c.canary_user_id);

  Corpus out;
  out.vocab = corpus.vocab;
  out.tokenized = corpus.tokenized;
  for (const auto& [uid, user] : corpus.users) {
    if (!canary_ids.count(uid)) {
      out.users.emplace(uid, user);
      continue;
    }
    std::vector<size_t> ft_indices;
    UserRecord rec;
    rec.user_id = uid;
    for (size_t i = 0; i < user.documents.size(); ++i) {
      if (split.is_reserved(uid, user.documents[i].doc_id)) continue;
      ft_indices.push_back(i);
    }
    std::set<size_t> keep_ft(ft_indices.begin(), ft_indices.end());
    if (ft_indices.size() > docs_per_canary) {
      keep_ft.clear();
      Rng rng(derive_seed(seed, "canary-limit:" + uid));
      for (size_t k : rng.sample_without_replacement(ft_indices.size(), docs_per_canary)) {
        keep_ft.insert(ft_indices[k]);
      }
    }
    for (size_t i = 0; i < user.documents.size(); ++i) {
      const auto& doc = user.documents[i];
      if (split.is_reserved(uid, doc.doc_id) || keep_ft.count(i)) rec.documents.push_back(doc);
    }
    out.users.emplace(uid, std::move(rec));
  }
  return out;
}

void save_canary_registry(const std::vector<CanaryUser>& registry,
                          const std::filesystem::path& file) {
  JsonWriter w;
  w.begin_array();
  for (const auto& c : registry) {
    w.begin_object();
    w.kv("canary_user_id", c.canary_user_id);
    w.kv("base_user_id", c.base_user_id);
    w.kv("length", c.length);
    w.key("substring_tokens").begin_array();
    for (TokenId t : c.substring) w.value(static_cast<uint64_t>(t));
    w.end_array();
    w.end_object();
  }
  w.end_array();
  write_file(file, w.str() + "\n");
}

std::vector<CanaryUser> load_canary_registry(const std::filesystem::path& file) {
  nlohmann::json arr = nlohmann::json::parse(read_file(file));
  std::vector<CanaryUser> registry;
  for (const auto& obj : arr) {
    CanaryUser c;
    c.canary_user_id = obj.at("canary_user_id").get<std::string>();
    c.base_user_id = obj.at("base_user_id").get<std::string>();
    c.length = obj.at("length").get<size_t>();
    for (const auto& t : obj.at("substring_tokens")) c.substring.push_back(t.get<TokenId>());
    registry.push_back(std::move(c));
  }
  return registry;
}

}  // namespace uinfer
