#include <doctest.h>

#include <cmath>

#include "uinfer/attack.hpp"
#include "uinfer/metrics.hpp"
#include "uinfer/rng.hpp"

using namespace uinfer;

namespace {

std::shared_ptr<NGramModel> unigram(std::vector<std::pair<TokenId, double>> counts,
                                    double alpha = 1e-12, uint32_t vocab = 4) {
  auto m = std::make_shared<NGramModel>(1, alpha, vocab, false);
  for (auto [t, c] : counts) m->set_count({}, t, c);
  return m;
}

Document make_doc(std::vector<TokenId> tokens, const std::string& id = "d",
                  const std::string& user = "u") {
  Document doc;
  doc.doc_id = id;
  doc.user_id = user;
  doc.tokens = std::move(tokens);
  return doc;
}

}  // namespace

TEST_CASE("doc_score is zero when target equals reference") {
  auto m = unigram({{2, 3.0}, {3, 1.0}});
  const Document doc = make_doc({2, 3, 2});
  CHECK(doc_score(doc, *m, *m) == 0.0);
}

TEST_CASE("doc_score hand arithmetic: ln 1.5") {
  // target p(a) = .75 vs reference p(a) = .5 on doc [a]
  auto target = unigram({{2, 3.0}, {3, 1.0}});
  auto ref = unigram({{2, 1.0}, {3, 1.0}});
  const Document doc = make_doc({2});
  CHECK(doc_score(doc, *target, *ref) == doctest::Approx(std::log(1.5)).epsilon(1e-9));
  CHECK(doc_score(doc, *target, *ref) == doctest::Approx(0.4055).epsilon(1e-4));
}

TEST_CASE("doc_score is additive over concatenation for unigram models") {
  auto target = unigram({{2, 3.0}, {3, 1.0}}, 0.1);
  auto ref = unigram({{2, 1.0}, {3, 1.0}}, 0.1);
  const Document x = make_doc({2, 3});
  const Document y = make_doc({3, 3, 2});
  Document xy = make_doc({2, 3, 3, 3, 2});
  CHECK(doc_score(xy, *target, *ref) ==
        doctest::Approx(doc_score(x, *target, *ref) + doc_score(y, *target, *ref))
            .epsilon(1e-12));
}

TEST_CASE("doc_score length normalization divides by token count") {
  auto target = unigram({{2, 3.0}, {3, 1.0}});
  auto ref = unigram({{2, 1.0}, {3, 1.0}});
  const Document doc = make_doc({2, 2});
  const double raw = doc_score(doc, *target, *ref, false);
  CHECK(doc_score(doc, *target, *ref, true) == doctest::Approx(raw / 2.0).epsilon(1e-12));
}

TEST_CASE("vocab mismatch is an error") {
  auto target = unigram({{2, 1.0}}, 0.1, 4);
  auto ref = unigram({{2, 1.0}}, 0.1, 5);
  const Document doc = make_doc({2});
  CHECK_THROWS_WITH_AS(doc_score(doc, *target, *ref), doctest::Contains("vocabular"),
                       std::invalid_argument);
}

TEST_CASE("user_statistic aggregations") {
  // models engineered so per-doc scores are (0.2, 0.4, 0.6) exactly is
  // tricky; instead check the aggregation wiring on a fabricated score
  // vector through mean/min/max semantics
  auto target = unigram({{2, 3.0}, {3, 1.0}});
  auto ref = unigram({{2, 1.0}, {3, 1.0}});
  Document d1 = make_doc({2}, "d1");       // ln 1.5
  Document d2 = make_doc({2, 2}, "d2");    // 2 ln 1.5
  Document d3 = make_doc({2, 2, 2}, "d3"); // 3 ln 1.5
  const std::vector<const Document*> docs{&d1, &d2, &d3};

  const auto mean_score = user_statistic("u", docs, *target, *ref, Aggregation::kMean);
  CHECK(mean_score.m == 3);
  CHECK(mean_score.per_doc.size() == 3);
  CHECK(mean_score.statistic == doctest::Approx(2.0 * std::log(1.5)).epsilon(1e-9));

  const auto max_score = user_statistic("u", docs, *target, *ref, Aggregation::kMax);
  CHECK(max_score.statistic == doctest::Approx(3.0 * std::log(1.5)).epsilon(1e-9));
  const auto min_score = user_statistic("u", docs, *target, *ref, Aggregation::kMin);
  CHECK(min_score.statistic == doctest::Approx(std::log(1.5)).epsilon(1e-9));

  // target == ref: every statistic is exactly zero
  const auto null_score = user_statistic("u", docs, *target, *target, Aggregation::kMean);
  CHECK(null_score.statistic == 0.0);

  CHECK_THROWS_AS(user_statistic("u", {}, *target, *ref, Aggregation::kMean),
                  std::invalid_argument);
}

TEST_CASE("mean statistic on a fixed score vector") {
  // per-doc scores (0.2, 0.4, 0.6): mean 0.4, max 0.6, min 0.2
  const std::vector<double> per_doc{0.2, 0.4, 0.6};
  double sum = 0.0;
  for (double v : per_doc) sum += v;
  CHECK(sum / 3.0 == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("decision thresholding") {
  AttackScore score;
  score.user_id = "u";
  score.statistic = 0.5;
  CHECK(decide(score, 0.4).reject_null);
  CHECK(!decide(score, 0.5).reject_null);  // strict inequality
  CHECK(!decide(score, 0.6).reject_null);
}

TEST_CASE("score_all_users respects the split reservation and m_limit") {
  SyntheticUserSpec spec;
  spec.n_users = 8;
  spec.docs_per_user_min = spec.docs_per_user_max = 20;
  spec.doc_len_min = spec.doc_len_max = 8;
  spec.base_dist.assign(16, 1.0 / 16.0);
  spec.perturbation = 4.0;
  Corpus corpus = generate_synthetic_corpus(spec, 17);
  SplitPlan split = make_split(corpus, 0.5, 0.25, 0.1, 17);  // 5 attacker docs each

  auto target = std::make_shared<NGramModel>(train_ngram(corpus, split, 2, 0.01));
  std::vector<const Document*> all_docs;
  for (const auto& [_, user] : corpus.users) {
    for (const auto& doc : user.documents) all_docs.push_back(&doc);
  }
  auto ref = std::make_shared<NGramModel>(
      train_ngram_on_docs(all_docs, 2, 0.01, corpus.vocab.size()));

  const auto scores = score_all_users(corpus, split, *target, *ref, Aggregation::kMean,
                                      std::nullopt, 3);
  CHECK(scores.held_in.size() == 4);
  CHECK(scores.held_out.size() == 4);
  for (const auto& s : scores.held_in) CHECK(s.m == 5);

  // m_limit 1: every AttackScore has m = 1
  const auto limited = score_all_users(corpus, split, *target, *ref, Aggregation::kMean, 1, 3);
  for (const auto& s : limited.held_in) CHECK(s.m == 1);
  for (const auto& s : limited.held_out) CHECK(s.m == 1);

  // m_limit >= available: identity
  const auto big = score_all_users(corpus, split, *target, *ref, Aggregation::kMean, 100, 3);
  for (const auto& s : big.held_in) CHECK(s.m == 5);

  // deterministic under a fixed seed, independent of jobs
  const auto again = score_all_users(corpus, split, *target, *ref, Aggregation::kMean, 1, 3, 4);
  REQUIRE(again.held_in.size() == limited.held_in.size());
  for (size_t i = 0; i < again.held_in.size(); ++i) {
    CHECK(again.held_in[i].user_id == limited.held_in[i].user_id);
    CHECK(again.held_in[i].statistic == limited.held_in[i].statistic);
  }

  // canonical ordering by user_id
  for (size_t i = 1; i < scores.held_in.size(); ++i) {
    CHECK(scores.held_in[i - 1].user_id < scores.held_in[i].user_id);
  }
}

TEST_CASE("scores csv round trip") {
  ScoredUsers scores;
  AttackScore a;
  a.user_id = "alice";
  a.m = 3;
  a.statistic = 0.125;
  a.aggregation = Aggregation::kMean;
  scores.held_in.push_back(a);
  AttackScore b;
  b.user_id = "bob";
  b.m = 2;
  b.statistic = -1.5;
  b.aggregation = Aggregation::kMean;
  scores.held_out.push_back(b);

  const std::string csv = scores_to_csv(scores);
  const ScoredUsers loaded = scores_from_csv(csv);
  REQUIRE(loaded.held_in.size() == 1);
  REQUIRE(loaded.held_out.size() == 1);
  CHECK(loaded.held_in[0].user_id == "alice");
  CHECK(loaded.held_in[0].m == 3);
  CHECK(loaded.held_in[0].statistic == 0.125);
  CHECK(loaded.held_out[0].statistic == -1.5);
}

TEST_CASE("held-in mean statistic is non-decreasing in fit strength (statistical)") {
  // Scored docs come from the user's training distribution (their
  // fine-tune docs), where every n-gram is inside the target's support.
  // Fresh attacker docs can hit the smoothing floor of unseen contexts,
  // which makes the statistic dip near lambda 1; the claim is about the
  // training distribution.
  size_t increasing = 0, total = 0;
  for (uint64_t seed : {31u, 32u, 33u}) {
    SyntheticUserSpec spec;
    spec.n_users = 16;
    spec.docs_per_user_min = spec.docs_per_user_max = 15;
    spec.doc_len_min = spec.doc_len_max = 20;
    spec.base_dist.assign(40, 1.0 / 40.0);
    spec.perturbation = 20.0;
    spec.signature_len = 5;
    spec.signature_prob = 1.0;
    Corpus corpus = generate_synthetic_corpus(spec, seed);
    SplitPlan split = make_split(corpus, 0.5, 0.2, 0.1, seed);
    auto target = std::make_shared<NGramModel>(train_ngram(corpus, split, 3, 0.01));
    Corpus fresh = generate_synthetic_corpus(spec, seed + 1000);
    std::vector<const Document*> fresh_docs;
    for (const auto& [_, user] : fresh.users) {
      for (const auto& doc : user.documents) fresh_docs.push_back(&doc);
    }
    auto ref = std::make_shared<NGramModel>(
        train_ngram_on_docs(fresh_docs, 3, 0.01, corpus.vocab.size()));

    // aggregate over held-in users: individual users may wobble, the
    // population mean should not
    double prev = -1e300;
    bool monotone = true;
    for (double lambda : {0.0, 0.3, 0.7, 1.0}) {
      const FitStrengthModel mixed(target, ref, lambda);
      double sum = 0.0;
      for (const auto& uid : split.held_in) {
        const auto docs = fine_tune_docs_of_user(corpus, split, uid);
        sum += user_statistic(uid, docs, mixed, *ref, Aggregation::kMean).statistic;
      }
      const double mean = sum / static_cast<double>(split.held_in.size());
      if (mean < prev - 1e-9) monotone = false;
      prev = mean;
    }
    ++total;
    if (monotone) ++increasing;
  }
  CHECK(increasing == total);
}

TEST_CASE("null attack gives identical score distributions and AUROC one half") {
  SyntheticUserSpec spec;
  spec.n_users = 6;
  spec.docs_per_user_min = spec.docs_per_user_max = 10;
  spec.doc_len_min = spec.doc_len_max = 6;
  spec.base_dist.assign(10, 0.1);
  spec.perturbation = 2.0;
  Corpus corpus = generate_synthetic_corpus(spec, 23);
  SplitPlan split = make_split(corpus, 0.5, 0.2, 0.1, 23);
  auto model = std::make_shared<NGramModel>(train_ngram(corpus, split, 3, 0.01));

  const auto scores =
      score_all_users(corpus, split, *model, *model, Aggregation::kMean, std::nullopt, 1);
  for (const auto& s : scores.held_in) CHECK(s.statistic == 0.0);
  for (const auto& s : scores.held_out) CHECK(s.statistic == 0.0);
  CHECK(auroc(scores.held_in_values(), scores.held_out_values()) == 0.5);
}
