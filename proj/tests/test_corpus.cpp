#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "uinfer/corpus.hpp"
#include "uinfer/io.hpp"
#include "uinfer/rng.hpp"

using namespace uinfer;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("uinfer_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

Corpus tiny_tokenized(const std::vector<std::pair<std::string, std::string>>& user_texts) {
  const auto dir = temp_dir("tiny");
  std::ofstream out(dir / "input.jsonl");
  for (const auto& [user, text] : user_texts) {
    JsonWriter w;
    w.begin_object().kv("user", user).kv("text", text).end_object();
    out << w.str() << "\n";
  }
  out.close();
  auto ingested = ingest_jsonl(dir / "input.jsonl");
  return build_vocab_and_tokenize(ingested.corpus, 1).corpus;
}

}  // namespace

TEST_CASE("word_tokenize splits on whitespace and punctuation") {
  CHECK(word_tokenize("don't stop") == std::vector<std::string>{"don", "'", "t", "stop"});
  CHECK(word_tokenize("a b") == std::vector<std::string>{"a", "b"});
  CHECK(word_tokenize("  a\t\nb ") == std::vector<std::string>{"a", "b"});
  CHECK(word_tokenize("x,y.z") == std::vector<std::string>{"x", ",", "y", ".", "z"});
  CHECK(word_tokenize("").empty());
}

TEST_CASE("ingest groups documents by user") {
  const auto dir = temp_dir("ingest");
  {
    std::ofstream out(dir / "two.jsonl");
    out << R"({"user":"a","text":"one"})" << "\n";
    out << R"({"user":"a","text":"two"})" << "\n";
  }
  auto two = ingest_jsonl(dir / "two.jsonl");
  CHECK(two.corpus.n_users() == 1);
  CHECK(two.corpus.users.at("a").documents.size() == 2);
  CHECK(two.corpus.users.at("a").documents[0].doc_id == "1");

  {
    std::ofstream out(dir / "three.jsonl");
    out << R"({"user":"a","text":"one"})" << "\n";
    out << R"({"user":"b","text":"two"})" << "\n";
    out << R"({"user":"a","text":"three"})" << "\n";
  }
  auto three = ingest_jsonl(dir / "three.jsonl");
  CHECK(three.corpus.n_users() == 2);
  CHECK(three.corpus.users.at("a").documents.size() == 2);
  CHECK(three.corpus.users.at("b").documents.size() == 1);
}

TEST_CASE("ingest validation errors name the line") {
  const auto dir = temp_dir("ingest_err");
  {
    std::ofstream out(dir / "missing.jsonl");
    out << R"({"user":"a"})" << "\n";
  }
  CHECK_THROWS_WITH_AS(ingest_jsonl(dir / "missing.jsonl"),
                       doctest::Contains("line 1: missing field \"text\""), std::runtime_error);
  {
    std::ofstream out(dir / "malformed.jsonl");
    out << R"({"user":"a","text":"ok"})" << "\n";
    out << "not json" << "\n";
  }
  CHECK_THROWS_WITH_AS(ingest_jsonl(dir / "malformed.jsonl"), doctest::Contains("line 2"),
                       std::runtime_error);
}

TEST_CASE("ingest skips empty text with a count") {
  const auto dir = temp_dir("ingest_empty");
  {
    std::ofstream out(dir / "in.jsonl");
    out << R"({"user":"a","text":""})" << "\n";
    out << R"({"user":"a","text":"keep"})" << "\n";
  }
  auto result = ingest_jsonl(dir / "in.jsonl");
  CHECK(result.skipped_empty == 1);
  CHECK(result.corpus.users.at("a").documents.size() == 1);
}

TEST_CASE("vocab build applies the frequency threshold") {
  const auto dir = temp_dir("vocab");
  {
    std::ofstream out(dir / "in.jsonl");
    out << R"({"user":"u","text":"a b"})" << "\n";
    out << R"({"user":"u","text":"a c"})" << "\n";
  }
  auto ingested = ingest_jsonl(dir / "in.jsonl");

  auto full = build_vocab_and_tokenize(ingested.corpus, 1);
  CHECK(full.corpus.vocab.size() == 5);  // unk, eos, a, b, c
  const auto& doc1 = full.corpus.users.at("u").documents[0];
  REQUIRE(doc1.tokens.size() == 3);
  CHECK(doc1.tokens[0] == full.corpus.vocab.lookup("a"));
  CHECK(doc1.tokens[1] == full.corpus.vocab.lookup("b"));
  CHECK(doc1.tokens[2] == Vocab::kEosId);

  auto thresholded = build_vocab_and_tokenize(ingested.corpus, 2);
  CHECK(thresholded.corpus.vocab.size() == 3);  // unk, eos, a
  const auto& doc2 = thresholded.corpus.users.at("u").documents[0];
  CHECK(doc2.tokens[0] == thresholded.corpus.vocab.lookup("a"));
  CHECK(doc2.tokens[1] == Vocab::kUnkId);

  CHECK_THROWS_AS(build_vocab_and_tokenize(full.corpus, 1), std::invalid_argument);
}

TEST_CASE("token count is stable under re-tokenization with the frozen vocab") {
  Corpus corpus = tiny_tokenized({{"u", "alpha beta, gamma"}, {"u", "alpha alpha"}});
  for (const auto& [_, user] : corpus.users) {
    for (const auto& doc : user.documents) {
      const auto words = word_tokenize(doc.text);
      CHECK(words.size() + 1 == doc.tokens.size());  // + EOS
      for (size_t i = 0; i < words.size(); ++i) {
        CHECK(corpus.vocab.lookup(words[i]) == doc.tokens[i]);
      }
    }
  }
}

TEST_CASE("filter_min_docs removes small users and reports them") {
  Corpus corpus = tiny_tokenized({
      {"big", "one two"}, {"big", "three"}, {"big", "four"}, {"big", "five"}, {"big", "six"},
      {"small", "a"}, {"small", "b"},
  });
  auto [filtered, report] = filter_min_docs(corpus, 3);
  CHECK(filtered.n_users() == 1);
  CHECK(filtered.users.count("big") == 1);
  CHECK(report.removed_users == std::vector<std::string>{"small"});

  auto [identity, report2] = filter_min_docs(corpus, 1);
  CHECK(identity.n_users() == 2);
  CHECK(report2.removed_users.empty());

  CHECK_THROWS_WITH_AS(filter_min_docs(corpus, 100), doctest::Contains("empty corpus"),
                       std::runtime_error);
}

TEST_CASE("dedup keeps first copy within user, ignores cross-user duplicates") {
  Corpus corpus = tiny_tokenized({
      {"u1", "same text"}, {"u1", "same text"}, {"u1", "other"},
      {"u2", "same text"},
  });
  auto [deduped, report] = dedup_within_user(corpus);
  CHECK(deduped.users.at("u1").documents.size() == 2);
  CHECK(deduped.users.at("u2").documents.size() == 1);  // cross-user copy untouched
  CHECK(report.removed_per_user.at("u1") == 1);
  CHECK(report.total_removed == 1);

  // idempotence
  auto [again, report2] = dedup_within_user(deduped);
  CHECK(report2.total_removed == 0);
  CHECK(again.n_documents() == deduped.n_documents());
}

TEST_CASE("dedup counts three copies as two removals") {
  Corpus corpus = tiny_tokenized({{"u", "x"}, {"u", "x"}, {"u", "x"}});
  auto [deduped, report] = dedup_within_user(corpus);
  CHECK(deduped.users.at("u").documents.size() == 1);
  CHECK(report.removed_per_user.at("u") == 2);
  REQUIRE(report.top_duplicates.size() == 1);
  CHECK(report.top_duplicates[0].second == 2);
}

TEST_CASE("cap_per_user caps, is identity under large caps, deterministic") {
  std::vector<std::pair<std::string, std::string>> texts;
  for (int i = 0; i < 8; ++i) texts.push_back({"u", "doc number " + std::to_string(i)});
  Corpus corpus = tiny_tokenized(texts);

  Corpus capped = cap_per_user(corpus, 5, 11);
  CHECK(capped.users.at("u").documents.size() == 5);
  Corpus capped2 = cap_per_user(corpus, 5, 11);
  for (size_t i = 0; i < 5; ++i) {
    CHECK(capped.users.at("u").documents[i].doc_id == capped2.users.at("u").documents[i].doc_id);
  }
  Corpus identity = cap_per_user(corpus, 8, 11);
  CHECK(identity.users.at("u").documents.size() == 8);

  // total doc count equals sum of min(cap, docs) over users and is monotone
  size_t prev = corpus.n_documents();
  for (size_t cap : {7, 5, 3, 1}) {
    Corpus c = cap_per_user(corpus, cap, 11);
    CHECK(c.n_documents() == std::min<size_t>(cap, 8));
    CHECK(c.n_documents() <= prev);
    prev = c.n_documents();
  }
}

TEST_CASE("make_split partitions users and reserves documents") {
  std::vector<std::pair<std::string, std::string>> texts;
  for (int u = 0; u < 4; ++u) {
    for (int d = 0; d < 10; ++d) {
      texts.push_back({"user" + std::to_string(u), "w" + std::to_string(u) + " " + std::to_string(d)});
    }
  }
  Corpus corpus = tiny_tokenized(texts);
  SplitPlan split = make_split(corpus, 0.5, 0.1, 0.1, 99);

  CHECK(split.held_in.size() == 2);
  CHECK(split.held_out.size() == 2);
  for (const auto& uid : split.held_in) CHECK(split.held_out.count(uid) == 0);

  for (const auto& [uid, user] : corpus.users) {
    // 10 docs at a 10% reservation -> exactly 1 attacker doc
    CHECK(split.attacker_docs.at(uid).size() == 1);
    CHECK(split.validation_docs.at(uid).size() == 1);
    for (const auto& id : split.attacker_docs.at(uid)) {
      CHECK(split.validation_docs.at(uid).count(id) == 0);
    }
    const auto ft = fine_tune_docs_of_user(corpus, split, uid);
    CHECK(ft.size() == 8);
    for (const auto* doc : ft) {
      CHECK(split.attacker_docs.at(uid).count(doc->doc_id) == 0);
      CHECK(split.validation_docs.at(uid).count(doc->doc_id) == 0);
    }
  }

  // determinism
  SplitPlan split2 = make_split(corpus, 0.5, 0.1, 0.1, 99);
  CHECK(split2.held_in == split.held_in);
  CHECK(split2.attacker_docs == split.attacker_docs);
  CHECK(split2.validation_docs == split.validation_docs);

  // fine-tune docs come from held-in users only
  for (const auto* doc : fine_tune_docs(corpus, split)) {
    CHECK(split.held_in.count(doc->user_id) == 1);
  }
}

TEST_CASE("make_split forces at least one attacker doc and errors on tiny users") {
  Corpus corpus = tiny_tokenized({{"tiny", "only doc"}, {"other", "a"}, {"other", "b"},
                                  {"other", "c"}, {"pad", "p"}, {"pad", "q"}, {"pad", "r"}});
  // "tiny" has 1 doc; attacker needs 1 and validation needs 1 -> impossible
  CHECK_THROWS_WITH_AS(make_split(corpus, 0.5, 0.1, 0.1, 1), doctest::Contains("tiny"),
                       std::runtime_error);
  // with validation disabled the single doc goes to the attacker
  SplitPlan split = make_split(corpus, 0.5, 0.1, 0.0, 1);
  CHECK(split.attacker_docs.at("tiny").size() == 1);
}

TEST_CASE("force_held_in pins users to the held-in side") {
  std::vector<std::pair<std::string, std::string>> texts;
  for (int u = 0; u < 6; ++u) {
    for (int d = 0; d < 4; ++d) {
      texts.push_back({"user" + std::to_string(u), "text " + std::to_string(d)});
    }
  }
  Corpus corpus = tiny_tokenized(texts);
  SplitPlan split = make_split(corpus, 0.5, 0.25, 0.0, 5, {"user3"});
  CHECK(split.held_in.count("user3") == 1);
}

TEST_CASE("nearest-rank percentiles") {
  CHECK(nearest_rank_percentile({1, 2, 3, 4, 5}, 0) == 1);
  CHECK(nearest_rank_percentile({1, 2, 3, 4, 5}, 50) == 3);
  CHECK(nearest_rank_percentile({1, 2, 3, 4, 5}, 100) == 5);
  CHECK(nearest_rank_percentile({10, 20}, 25) == 10);
  CHECK(nearest_rank_percentile({7}, 0) == 7);
  CHECK(nearest_rank_percentile({7}, 50) == 7);
  CHECK(nearest_rank_percentile({7}, 100) == 7);
}

TEST_CASE("summary_stats shapes the per-user counts") {
  std::vector<std::pair<std::string, std::string>> texts;
  for (int u = 0; u < 5; ++u) {
    for (int d = 0; d <= u; ++d) {
      texts.push_back({"user" + std::to_string(u), "t" + std::to_string(d)});
    }
  }
  Corpus corpus = tiny_tokenized(texts);  // counts 1..5
  const CorpusStats stats = summary_stats(corpus);
  CHECK(stats.n_users == 5);
  CHECK(stats.n_examples == 15);
  CHECK(stats.p0 == 1);
  CHECK(stats.p50 == 3);
  CHECK(stats.p100 == 5);
}

TEST_CASE("synthetic corpus is deterministic and signature-complete") {
  SyntheticUserSpec spec;
  spec.n_users = 6;
  spec.docs_per_user_min = 3;
  spec.docs_per_user_max = 5;
  spec.doc_len_min = 8;
  spec.doc_len_max = 12;
  spec.base_dist.assign(20, 0.05);
  spec.perturbation = 10.0;
  spec.signature_len = 4;
  spec.signature_prob = 1.0;

  Corpus a = generate_synthetic_corpus(spec, 123);
  Corpus b = generate_synthetic_corpus(spec, 123);
  REQUIRE(a.n_users() == 6);
  CHECK(a.n_documents() == b.n_documents());
  for (const auto& [uid, user] : a.users) {
    const auto& other = b.users.at(uid);
    REQUIRE(other.documents.size() == user.documents.size());
    for (size_t i = 0; i < user.documents.size(); ++i) {
      CHECK(user.documents[i].tokens == other.documents[i].tokens);
      CHECK(user.documents[i].text == other.documents[i].text);
    }
  }
  a.check_invariants();

  // signature probability 1.0: every document contains some fixed 4-token run
  // shared by all of the user's documents
  for (const auto& [uid, user] : a.users) {
    const auto& first = user.documents[0].tokens;
    bool found_shared = false;
    for (size_t start = 0; start + spec.signature_len <= first.size() - 1 && !found_shared;
         ++start) {
      std::vector<TokenId> cand(first.begin() + start, first.begin() + start + spec.signature_len);
      bool in_all = true;
      for (const auto& doc : user.documents) {
        bool in_doc = false;
        for (size_t s = 0; s + cand.size() <= doc.word_count(); ++s) {
          if (std::equal(cand.begin(), cand.end(), doc.tokens.begin() + s)) {
            in_doc = true;
            break;
          }
        }
        if (!in_doc) {
          in_all = false;
          break;
        }
      }
      found_shared = in_all;
    }
    CHECK(found_shared);
  }
}

TEST_CASE("high perturbation pulls user distributions to the base distribution") {
  SyntheticUserSpec spec;
  spec.n_users = 2;
  spec.docs_per_user_min = spec.docs_per_user_max = 40;
  spec.doc_len_min = spec.doc_len_max = 50;
  spec.base_dist = {0.7, 0.1, 0.1, 0.1};
  spec.perturbation = 1e7;

  Corpus corpus = generate_synthetic_corpus(spec, 5);
  // empirical frequency of the dominant word approaches 0.7 for every user
  for (const auto& [_, user] : corpus.users) {
    size_t dominant = 0, total = 0;
    for (const auto& doc : user.documents) {
      for (size_t i = 0; i < doc.word_count(); ++i) {
        total += 1;
        if (doc.tokens[i] == 2) dominant += 1;
      }
    }
    CHECK(static_cast<double>(dominant) / static_cast<double>(total) ==
          doctest::Approx(0.7).epsilon(0.05));
  }
}

TEST_CASE("synthetic spec validation") {
  SyntheticUserSpec spec;
  spec.n_users = 1;
  spec.docs_per_user_min = spec.docs_per_user_max = 1;
  spec.doc_len_min = spec.doc_len_max = 1;
  spec.base_dist = {0.5, 0.5, 0.1};  // sums to 1.1
  spec.perturbation = 1.0;
  CHECK_THROWS_AS(generate_synthetic_corpus(spec, 1), std::invalid_argument);
  spec.base_dist = {0.5, 0.5};
  CHECK_NOTHROW(generate_synthetic_corpus(spec, 1));
}

TEST_CASE("corpus round-trips through the on-disk layout") {
  Corpus corpus = tiny_tokenized({{"u1", "hello world"}, {"u2", "hello again, world"}});
  const auto dir = temp_dir("roundtrip");
  save_corpus(corpus, dir);
  Corpus loaded = load_corpus(dir);
  CHECK(loaded.n_users() == corpus.n_users());
  CHECK(loaded.vocab.id_to_token == corpus.vocab.id_to_token);
  for (const auto& [uid, user] : corpus.users) {
    const auto& other = loaded.users.at(uid);
    REQUIRE(other.documents.size() == user.documents.size());
    for (size_t i = 0; i < user.documents.size(); ++i) {
      CHECK(other.documents[i].doc_id == user.documents[i].doc_id);
      CHECK(other.documents[i].tokens == user.documents[i].tokens);
      CHECK(other.documents[i].text == user.documents[i].text);
    }
  }
}

TEST_CASE("split round-trips through split.json") {
  std::vector<std::pair<std::string, std::string>> texts;
  for (int u = 0; u < 4; ++u) {
    for (int d = 0; d < 6; ++d) texts.push_back({"user" + std::to_string(u), "a b c"});
  }
  Corpus corpus = tiny_tokenized(texts);
  SplitPlan split = make_split(corpus, 0.5, 0.2, 0.2, 7);
  const auto dir = temp_dir("splitjson");
  save_split(split, dir / "split.json");
  SplitPlan loaded = load_split(dir / "split.json");
  CHECK(loaded.seed == split.seed);
  CHECK(loaded.held_in == split.held_in);
  CHECK(loaded.held_out == split.held_out);
  CHECK(loaded.attacker_docs == split.attacker_docs);
  CHECK(loaded.validation_docs == split.validation_docs);
}

TEST_CASE("inject_duplicates multiplies per-user documents") {
  Corpus corpus = tiny_tokenized({{"u", "one"}, {"u", "two"}});
  Corpus dup = inject_duplicates(corpus, 3);
  CHECK(dup.users.at("u").documents.size() == 6);
  dup.check_invariants();  // ids stay unique
  auto [deduped, report] = dedup_within_user(dup);
  CHECK(deduped.users.at("u").documents.size() == 2);
  CHECK(report.total_removed == 4);
}
