#include "uinfer/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "uinfer/io.hpp"
#include "uinfer/parallel.hpp"
#include "uinfer/rng.hpp"
#include "uinfer/theory.hpp"

namespace uinfer {

std::string reference_source_name(ReferenceSource s) {
  switch (s) {
    case ReferenceSource::kSyntheticFresh: return "synthetic-fresh";
    case ReferenceSource::kValidationSlice: return "validation-slice";
  }
  throw std::logic_error("unknown reference source");
}

ReferenceSource reference_source_from_name(const std::string& name) {
  if (name == "synthetic-fresh") return ReferenceSource::kSyntheticFresh;
  if (name == "validation-slice") return ReferenceSource::kValidationSlice;
  throw std::invalid_argument("unknown reference source \"" + name +
                              "\" (want synthetic-fresh|validation-slice)");
}

void ExperimentConfig::validate() const {
  if (use_synthetic()) {
    synth.validate();
  }
  if (duplication_factor < 1) throw std::invalid_argument("duplication_factor must be >= 1");
  if (canary) canary->validate();
  if (!(fit_lambda >= 0.0 && fit_lambda <= 1.0))
    throw std::invalid_argument("fit_lambda must be in [0,1]");
  if (effective_reference() == ReferenceSource::kSyntheticFresh && !use_synthetic())
    throw std::invalid_argument("synthetic-fresh reference needs a synthetic corpus source");
  if (bootstrap_B < 1) throw std::invalid_argument("bootstrap_B must be >= 1");
  if (histogram_bins < 1) throw std::invalid_argument("histogram_bins must be >= 1");
  for (double f : fpr_grid) {
    if (f < 0.0 || f > 1.0) throw std::invalid_argument("fpr grid values must be in [0,1]");
  }
}

Histogram make_histogram(std::span<const double> held_in, std::span<const double> held_out,
                         size_t bins) {
  if (held_in.empty() || held_out.empty())
    throw std::invalid_argument("histogram needs scores on both sides");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : held_in) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (double v : held_out) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  Histogram h;
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
    bins = 1;
  }
  h.edges.resize(bins + 1);
  for (size_t i = 0; i <= bins; ++i) {
    h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  }
  h.held_in.assign(bins, 0);
  h.held_out.assign(bins, 0);
  auto bin_of = [&](double v) {
    const double t = (v - lo) / (hi - lo) * static_cast<double>(bins);
    size_t b = static_cast<size_t>(std::floor(t));
    return std::min(b, bins - 1);  // max lands in the last bin
  };
  for (double v : held_in) ++h.held_in[bin_of(v)];
  for (double v : held_out) ++h.held_out[bin_of(v)];
  return h;
}

SeedEcho seeds_for(const ExperimentConfig& config) {
  SeedEcho s;
  s.master = config.seed;
  s.corpus = derive_seed(config.seed, "corpus");
  s.split = derive_seed(config.seed, "split");
  s.canary = derive_seed(config.seed, "canary");
  s.pretrain = derive_seed(config.seed, "pretrain");
  s.attack = derive_seed(config.seed, "attack");
  s.bootstrap = derive_seed(config.seed, "bootstrap");
  return s;
}

namespace {

struct BuiltCorpus {
  Corpus corpus;
  std::vector<CanaryUser> canaries;
  size_t duplicates_removed = 0;
};

BuiltCorpus build_corpus(const ExperimentConfig& config, const SeedEcho& seeds) {
  BuiltCorpus built;
  if (config.use_synthetic()) {
    built.corpus = generate_synthetic_corpus(config.synth, seeds.corpus);
  } else {
    built.corpus = load_corpus(config.corpus_path);
    if (!built.corpus.tokenized)
      throw std::runtime_error("corpus at " + config.corpus_path + " is not tokenized");
  }
  if (config.duplication_factor > 1) {
    built.corpus = inject_duplicates(built.corpus, config.duplication_factor);
  }
  if (config.dedup) {
    auto [deduped, report] = dedup_within_user(built.corpus);
    built.corpus = std::move(deduped);
    built.duplicates_removed = report.total_removed;
  }
  if (config.canary) {
    CanarySpec spec = *config.canary;
    spec.seed = seeds.canary;
    auto result = make_canaries(built.corpus, spec);
    built.corpus = std::move(result.corpus);
    built.canaries = std::move(result.registry);
  }
  return built;
}

std::shared_ptr<NGramModel> train_reference(const ExperimentConfig& config, const Corpus& corpus,
                                            const SplitPlan& split, const SeedEcho& seeds) {
  switch (config.effective_reference()) {
    case ReferenceSource::kSyntheticFresh: {
      const Corpus pretrain = generate_synthetic_corpus(config.synth, seeds.pretrain);
      std::vector<const Document*> docs;
      for (const auto& [_, user] : pretrain.users) {
        for (const auto& doc : user.documents) docs.push_back(&doc);
      }
      return std::make_shared<NGramModel>(train_ngram_on_docs(
          docs, config.order, config.alpha, corpus.vocab.size(), config.eos_enabled));
    }
    case ReferenceSource::kValidationSlice: {
      auto docs = validation_docs(corpus, split, true);
      auto out_docs = validation_docs(corpus, split, false);
      docs.insert(docs.end(), out_docs.begin(), out_docs.end());
      if (docs.empty())
        throw std::runtime_error("validation-slice reference needs validation_frac > 0");
      return std::make_shared<NGramModel>(train_ngram_on_docs(
          docs, config.order, config.alpha, corpus.vocab.size(), config.eos_enabled));
    }
  }
  throw std::logic_error("unknown reference source");
}

double auroc_of(const std::vector<AttackScore>& in, const std::vector<AttackScore>& out) {
  std::vector<double> vi, vo;
  vi.reserve(in.size());
  vo.reserve(out.size());
  for (const auto& s : in) vi.push_back(s.statistic);
  for (const auto& s : out) vo.push_back(s.statistic);
  return auroc(vi, vo);
}

}  // namespace

Pipeline build_pipeline(const ExperimentConfig& config) {
  config.validate();
  Pipeline p;
  p.seeds = seeds_for(config);
  BuiltCorpus built = build_corpus(config, p.seeds);
  p.corpus = std::move(built.corpus);
  p.canaries = std::move(built.canaries);

  std::set<std::string> force_held_in;
  for (const auto& c : p.canaries) force_held_in.insert(c.canary_user_id);
  p.split = make_split(p.corpus, config.held_in_frac, config.attacker_frac,
                       config.validation_frac, p.seeds.split, force_held_in);

  p.target_raw = std::make_shared<NGramModel>(
      train_ngram(p.corpus, p.split, config.order, config.alpha, config.eos_enabled));
  p.reference = train_reference(config, p.corpus, p.split, p.seeds);
  p.target = std::make_shared<FitStrengthModel>(p.target_raw, p.reference, config.fit_lambda);
  return p;
}

AuditReport evaluate_scores(const ScoredUsers& scores, const std::vector<double>& fpr_grid,
                            size_t bootstrap_B, uint64_t seed, int jobs, size_t histogram_bins) {
  AuditReport report;
  report.scores = scores;
  const auto in_values = scores.held_in_values();
  const auto out_values = scores.held_out_values();
  report.auroc_value = auroc(in_values, out_values);
  report.roc = roc_curve(in_values, out_values);
  for (double f : fpr_grid) {
    TprCell cell;
    cell.fpr_target = f;
    cell.tpr = tpr_at_fpr(report.roc, f);
    cell.resolution_ok =
        f <= 0.0 || static_cast<double>(out_values.size()) >= 1.0 / f;
    report.tpr_table.push_back(cell);
  }
  if (bootstrap_B > 0) {
    report.bootstrap = bootstrap_auroc(in_values, out_values, bootstrap_B, seed, jobs);
  }
  report.histogram = make_histogram(in_values, out_values, histogram_bins);
  return report;
}

AuditReport run_attack(const ExperimentConfig& config) {
  Pipeline p = build_pipeline(config);
  const ScoredUsers scores =
      score_all_users(p.corpus, p.split, *p.target, *p.reference, config.aggregation,
                      config.m_limit, p.seeds.attack, config.jobs, config.length_normalize);

  AuditReport report = evaluate_scores(scores, config.fpr_grid, config.bootstrap_B,
                                       p.seeds.bootstrap, config.jobs, config.histogram_bins);
  report.seeds = p.seeds;
  const auto val_in = validation_docs(p.corpus, p.split, true);
  const auto val_out = validation_docs(p.corpus, p.split, false);
  if (!val_in.empty() && !val_out.empty()) {
    report.gen_gap = generalization_gap(*p.target, p.split, p.corpus);
    report.gen_gap_defined = true;
  }

  if (!config.out_dir.empty()) {
    const std::filesystem::path dir(config.out_dir);
    write_config_json(config, p.seeds, dir / "config.json");
    write_file(dir / "scores.csv", scores_to_csv(report.scores));
    write_file(dir / "roc.csv", roc_to_csv(report.roc));
    write_report_json(report, dir / "report.json");
  }
  return report;
}

// --- sweeps ----------------------------------------------------------------------

std::vector<KnowledgeRow> sweep_attacker_knowledge(const ExperimentConfig& config,
                                                   const std::vector<size_t>& m_grid,
                                                   size_t draws) {
  if (m_grid.empty()) throw std::invalid_argument("m_grid is empty");
  if (draws < 1) throw std::invalid_argument("draws must be >= 1");
  Pipeline p = build_pipeline(config);

  // Per-doc scores are fixed across draws; only the subsample varies.
  struct UserDocs {
    std::string user_id;
    bool held_in = false;
    std::vector<double> per_doc;
  };
  std::vector<UserDocs> users;
  for (const auto& side : {true, false}) {
    const auto& ids = side ? p.split.held_in : p.split.held_out;
    for (const auto& uid : ids) users.push_back({uid, side, {}});
  }
  parallel_for(config.jobs, users.size(), [&](size_t i) {
    const auto docs = attacker_docs_of_user(p.corpus, p.split, users[i].user_id);
    if (docs.empty())
      throw std::runtime_error("user \"" + users[i].user_id + "\" has no attacker documents");
    for (const Document* doc : docs) {
      users[i].per_doc.push_back(
          doc_score(*doc, *p.target, *p.reference, config.length_normalize));
    }
  });
  size_t max_available = 0;
  for (const auto& u : users) max_available = std::max(max_available, u.per_doc.size());

  std::vector<KnowledgeRow> rows;
  for (size_t m : m_grid) {
    KnowledgeRow row;
    row.m = m;
    row.seed = derive_seed(config.seed, "knowledge", m);
    if (m > max_available) {
      row.skipped = true;
      row.warning = "m exceeds every user's attacker set; skipped";
      rows.push_back(std::move(row));
      continue;
    }
    std::vector<double> aurocs(draws);
    parallel_for(config.jobs, draws, [&](size_t d) {
      const uint64_t draw_seed = derive_seed(row.seed, "draw", d);
      std::vector<double> in_vals, out_vals;
      for (const auto& u : users) {
        const size_t take = std::min(m, u.per_doc.size());
        Rng rng(derive_seed(draw_seed, "user:" + u.user_id));
        double agg = 0.0;
        std::vector<double> chosen;
        chosen.reserve(take);
        for (size_t k : rng.sample_without_replacement(u.per_doc.size(), take)) {
          chosen.push_back(u.per_doc[k]);
        }
        switch (config.aggregation) {
          case Aggregation::kMean: {
            double sum = 0.0;
            for (double v : chosen) sum += v;
            agg = sum / static_cast<double>(chosen.size());
            break;
          }
          case Aggregation::kMin:
            agg = *std::min_element(chosen.begin(), chosen.end());
            break;
          case Aggregation::kMax:
            agg = *std::max_element(chosen.begin(), chosen.end());
            break;
        }
        (u.held_in ? in_vals : out_vals).push_back(agg);
      }
      aurocs[d] = auroc(in_vals, out_vals);
    });
    row.over_draws = summarize_samples(aurocs, row.seed);
    if (draws == 1) row.over_draws.degenerate = true;
    rows.push_back(std::move(row));
  }
  return rows;
}

CanarySweepResult sweep_canaries(const ExperimentConfig& config, const CanarySpec& spec) {
  spec.validate();
  ExperimentConfig with_canaries = config;
  with_canaries.canary = spec;
  Pipeline p = build_pipeline(with_canaries);

  const ScoredUsers scores =
      score_all_users(p.corpus, p.split, *p.target, *p.reference, config.aggregation,
                      config.m_limit, p.seeds.attack, config.jobs, config.length_normalize);

  std::map<std::string, size_t> canary_length;
  for (const auto& c : p.canaries) canary_length[c.canary_user_id] = c.length;

  std::vector<AttackScore> real_in;
  std::map<size_t, std::vector<AttackScore>> by_length;
  for (const auto& s : scores.held_in) {
    auto it = canary_length.find(s.user_id);
    if (it == canary_length.end()) {
      real_in.push_back(s);
    } else {
      by_length[it->second].push_back(s);
    }
  }

  CanarySweepResult result;
  result.real_auroc = auroc_of(real_in, scores.held_out);
  for (size_t l : spec.lengths) {
    CanaryRow row;
    row.length = l;
    row.seed = p.seeds.canary;
    const auto& in = by_length[l];
    row.n_canaries = in.size();
    if (in.empty()) throw std::runtime_error("no canaries of length " + std::to_string(l));
    row.canary_auroc = auroc_of(in, scores.held_out);
    result.rows.push_back(row);
  }
  return result;
}

std::vector<CapRow> sweep_data_cap(const ExperimentConfig& config,
                                   const std::vector<size_t>& cap_grid) {
  if (cap_grid.empty()) throw std::invalid_argument("cap_grid is empty");
  std::vector<CapRow> rows;

  if (config.canary) {
    // Fixed corpus and split; only the canaries' fine-tune contribution
    // shrinks, so their attacker docs stay comparable across caps.
    Pipeline p = build_pipeline(config);
    std::set<std::string> canary_ids;
    for (const auto& c : p.canaries) canary_ids.insert(c.canary_user_id);
    for (size_t cap : cap_grid) {
      CapRow row;
      row.cap = cap;
      row.seed = derive_seed(config.seed, "cap", cap);
      const Corpus capped = canary_data_limit(p.corpus, p.split, p.canaries, cap, row.seed);
      const auto target_raw = std::make_shared<NGramModel>(
          train_ngram(capped, p.split, config.order, config.alpha, config.eos_enabled));
      const FitStrengthModel target(target_raw, p.reference, config.fit_lambda);
      const ScoredUsers scores =
          score_all_users(capped, p.split, target, *p.reference, config.aggregation,
                          config.m_limit, p.seeds.attack, config.jobs, config.length_normalize);
      std::vector<AttackScore> canary_in, real_in;
      for (const auto& s : scores.held_in) {
        (canary_ids.count(s.user_id) ? canary_in : real_in).push_back(s);
      }
      row.auroc_value = auroc_of(canary_in, scores.held_out);
      row.real_auroc = auroc_of(real_in, scores.held_out);
      rows.push_back(row);
    }
    return rows;
  }

  for (size_t cap : cap_grid) {
    CapRow row;
    row.cap = cap;
    row.seed = derive_seed(config.seed, "cap", cap);
    ExperimentConfig point = config;
    point.out_dir.clear();
    const SeedEcho seeds = seeds_for(point);
    BuiltCorpus built = build_corpus(point, seeds);
    const Corpus capped = cap_per_user(built.corpus, cap, row.seed);
    SplitPlan split = make_split(capped, point.held_in_frac, point.attacker_frac,
                                 point.validation_frac, derive_seed(point.seed, "split"));
    const auto target_raw = std::make_shared<NGramModel>(
        train_ngram(capped, split, point.order, point.alpha, point.eos_enabled));
    const auto reference = train_reference(point, capped, split, seeds);
    const FitStrengthModel target(target_raw, reference, point.fit_lambda);
    const ScoredUsers scores =
        score_all_users(capped, split, target, *reference, point.aggregation, point.m_limit,
                        derive_seed(point.seed, "attack"), point.jobs, point.length_normalize);
    row.auroc_value = auroc_of(scores.held_in, scores.held_out);
    row.real_auroc = row.auroc_value;
    rows.push_back(row);
  }
  return rows;
}

LambdaSweepResult sweep_fit_strength(const ExperimentConfig& config,
                                     const std::vector<double>& lambda_grid) {
  if (lambda_grid.empty()) throw std::invalid_argument("lambda_grid is empty");
  Pipeline p = build_pipeline(config);

  LambdaSweepResult result;
  for (double lambda : lambda_grid) {
    const FitStrengthModel target(p.target_raw, p.reference, lambda);
    const ScoredUsers scores =
        score_all_users(p.corpus, p.split, target, *p.reference, config.aggregation,
                        config.m_limit, p.seeds.attack, config.jobs, config.length_normalize);
    LambdaRow row;
    row.lambda = lambda;
    row.auroc_value = auroc_of(scores.held_in, scores.held_out);
    row.gap = generalization_gap(target, p.split, p.corpus);
    result.rows.push_back(row);
  }

  std::vector<double> gaps, aurocs;
  for (const auto& r : result.rows) {
    gaps.push_back(r.gap);
    aurocs.push_back(r.auroc_value);
  }
  try {
    result.spearman_gap_auroc = spearman(gaps, aurocs);
  } catch (const std::exception&) {
    result.spearman_gap_auroc = std::numeric_limits<double>::quiet_NaN();
  }

  const double final_auroc = result.rows.back().auroc_value;
  result.lambda_95 = result.rows.back().lambda;
  for (const auto& r : result.rows) {
    if (r.auroc_value >= 0.95 * final_auroc) {
      result.lambda_95 = r.lambda;
      break;
    }
  }
  return result;
}

// --- comparisons --------------------------------------------------------------------

DedupCompareResult compare_dedup(const ExperimentConfig& config) {
  DedupCompareResult result;
  ExperimentConfig raw_config = config;
  raw_config.dedup = false;
  raw_config.out_dir.clear();
  ExperimentConfig dedup_config = config;
  dedup_config.dedup = true;
  dedup_config.out_dir.clear();

  result.raw = run_attack(raw_config);
  result.deduped = run_attack(dedup_config);

  BuiltCorpus built = build_corpus(raw_config, seeds_for(raw_config));
  result.duplicates_removed = dedup_within_user(built.corpus).second.total_removed;
  return result;
}

std::vector<DpRow> compare_dp(const ExperimentConfig& config, const std::vector<double>& sigma_grid,
                              double clip, double delta) {
  if (sigma_grid.empty()) throw std::invalid_argument("sigma_grid is empty");
  Pipeline p = build_pipeline(config);
  const auto val_in = validation_docs(p.corpus, p.split, true);

  std::vector<DpRow> rows;
  for (double sigma : sigma_grid) {
    DpRow row;
    row.sigma = sigma;
    uint64_t bits;
    static_assert(sizeof(bits) == sizeof(sigma));
    std::memcpy(&bits, &sigma, sizeof(bits));
    row.seed = derive_seed(config.seed, "dp-sigma", bits);
    DpTrainConfig cfg{clip, sigma, delta};
    DpTrainResult trained = train_dp_ngram(p.corpus, p.split, config.order, config.alpha, cfg,
                                           row.seed);
    row.epsilon = trained.epsilon;
    row.warning = trained.warning;
    const ScoredUsers scores =
        score_all_users(p.corpus, p.split, trained.model, *p.reference, config.aggregation,
                        config.m_limit, p.seeds.attack, config.jobs, config.length_normalize);
    row.auroc_value = auroc_of(scores.held_in, scores.held_out);
    if (!val_in.empty()) row.val_loss = mean_nll_per_token(trained.model, val_in);
    rows.push_back(std::move(row));
  }
  return rows;
}

// --- report files ----------------------------------------------------------------------

void write_config_json(const ExperimentConfig& config, const SeedEcho& seeds,
                       const std::filesystem::path& file) {
  JsonWriter w;
  w.begin_object();
  w.kv("corpus_path", config.corpus_path);
  if (config.use_synthetic()) {
    w.key("synthetic").begin_object();
    w.kv("n_users", config.synth.n_users);
    w.kv("docs_per_user_min", config.synth.docs_per_user_min);
    w.kv("docs_per_user_max", config.synth.docs_per_user_max);
    w.kv("doc_len_min", config.synth.doc_len_min);
    w.kv("doc_len_max", config.synth.doc_len_max);
    w.kv("vocab_words", config.synth.base_dist.size());
    w.kv("perturbation", config.synth.perturbation);
    w.kv("signature_len", config.synth.signature_len);
    w.kv("signature_prob", config.synth.signature_prob);
    w.end_object();
  }
  w.kv("duplication_factor", config.duplication_factor);
  w.kv("dedup", config.dedup);
  if (config.canary) {
    w.key("canary").begin_object();
    w.key("lengths").begin_array();
    for (size_t l : config.canary->lengths) w.value(l);
    w.end_array();
    w.kv("per_length", config.canary->per_length);
    w.end_object();
  }
  w.kv("held_in_frac", config.held_in_frac);
  w.kv("attacker_frac", config.attacker_frac);
  w.kv("validation_frac", config.validation_frac);
  w.kv("order", static_cast<int64_t>(config.order));
  w.kv("alpha", config.alpha);
  w.kv("eos_enabled", config.eos_enabled);
  w.kv("fit_lambda", config.fit_lambda);
  w.kv("reference_source", reference_source_name(config.effective_reference()));
  w.kv("aggregation", aggregation_name(config.aggregation));
  w.kv("length_normalize", config.length_normalize);
  if (config.m_limit) w.kv("m_limit", *config.m_limit);
  w.key("fpr_grid").begin_array();
  for (double f : config.fpr_grid) w.value(f);
  w.end_array();
  w.kv("bootstrap_B", config.bootstrap_B);
  w.kv("histogram_bins", config.histogram_bins);
  w.key("seeds").begin_object();
  w.kv("master", seeds.master);
  w.kv("corpus", seeds.corpus);
  w.kv("split", seeds.split);
  if (config.canary) w.kv("canary", seeds.canary);
  if (config.effective_reference() == ReferenceSource::kSyntheticFresh)
    w.kv("pretrain", seeds.pretrain);
  w.kv("attack", seeds.attack);
  w.kv("bootstrap", seeds.bootstrap);
  w.end_object();
  w.end_object();
  write_file(file, w.str() + "\n");
}

void write_report_json(const AuditReport& report, const std::filesystem::path& file) {
  JsonWriter w;
  w.begin_object();
  w.kv("auroc", report.auroc_value);
  w.key("tpr_at_fpr").begin_object();
  for (const auto& cell : report.tpr_table) {
    w.key(float17(cell.fpr_target)).begin_object();
    w.kv("tpr", cell.tpr);
    w.kv("resolution_ok", cell.resolution_ok);
    w.end_object();
  }
  w.end_object();
  if (report.bootstrap.B > 0) {
    w.key("bootstrap").begin_object();
    w.kv("B", report.bootstrap.B);
    w.kv("seed", report.bootstrap.seed);
    w.kv("mean", report.bootstrap.mean);
    w.kv("std", report.bootstrap.std_dev);
    w.key("ci").begin_array().value(report.bootstrap.ci_lo).value(report.bootstrap.ci_hi).end_array();
    w.kv("degenerate", report.bootstrap.degenerate);
    w.end_object();
  }
  if (report.gen_gap_defined) w.kv("generalization_gap", report.gen_gap);
  w.kv("n_held_in", report.scores.held_in.size());
  w.kv("n_held_out", report.scores.held_out.size());
  w.key("histogram").begin_object();
  w.key("edges").begin_array();
  for (double e : report.histogram.edges) w.value(e);
  w.end_array();
  w.key("held_in").begin_array();
  for (size_t c : report.histogram.held_in) w.value(c);
  w.end_array();
  w.key("held_out").begin_array();
  for (size_t c : report.histogram.held_out) w.value(c);
  w.end_array();
  w.end_object();
  w.key("seeds").begin_object();
  w.kv("master", report.seeds.master);
  w.kv("attack", report.seeds.attack);
  w.kv("bootstrap", report.seeds.bootstrap);
  w.end_object();
  w.end_object();
  write_file(file, w.str() + "\n");
}

std::string knowledge_rows_to_csv(const std::vector<KnowledgeRow>& rows) {
  std::string csv = "m,draws,auroc_mean,auroc_std,skipped,seed,warning\n";
  for (const auto& r : rows) {
    csv += std::to_string(r.m) + "," + std::to_string(r.over_draws.B) + "," +
           float17(r.over_draws.mean) + "," + float17(r.over_draws.std_dev) + "," +
           (r.skipped ? "1" : "0") + "," + std::to_string(r.seed) + "," + r.warning + "\n";
  }
  return csv;
}

std::string canary_sweep_to_csv(const CanarySweepResult& result) {
  std::string csv = "length,n_canaries,canary_auroc,real_auroc,seed\n";
  for (const auto& r : result.rows) {
    csv += std::to_string(r.length) + "," + std::to_string(r.n_canaries) + "," +
           float17(r.canary_auroc) + "," + float17(result.real_auroc) + "," +
           std::to_string(r.seed) + "\n";
  }
  return csv;
}

std::string cap_rows_to_csv(const std::vector<CapRow>& rows) {
  std::string csv = "cap,auroc,real_auroc,seed\n";
  for (const auto& r : rows) {
    csv += std::to_string(r.cap) + "," + float17(r.auroc_value) + "," + float17(r.real_auroc) +
           "," + std::to_string(r.seed) + "\n";
  }
  return csv;
}

std::string lambda_rows_to_csv(const LambdaSweepResult& result) {
  std::string csv = "lambda,auroc,generalization_gap,spearman,lambda_95\n";
  for (const auto& r : result.rows) {
    csv += float17(r.lambda) + "," + float17(r.auroc_value) + "," + float17(r.gap) + "," +
           float17(result.spearman_gap_auroc) + "," + float17(result.lambda_95) + "\n";
  }
  return csv;
}

std::string dp_rows_to_csv(const std::vector<DpRow>& rows) {
  std::string csv = "sigma,epsilon,auroc,val_loss,seed,warning\n";
  for (const auto& r : rows) {
    csv += float17(r.sigma) + "," + float17(r.epsilon) + "," + float17(r.auroc_value) + "," +
           float17(r.val_loss) + "," + std::to_string(r.seed) + "," + r.warning + "\n";
  }
  return csv;
}

}  // namespace uinfer
