// uinfer: user-inference privacy audit toolkit.
//
// Every pipeline stage (ingest/split/train/attack/eval), the experiment
// sweeps, the mitigation comparisons and the exact theory checks are
// exposed as subcommands. Randomized commands require an explicit --seed;
// outputs are byte-stable for a fixed seed regardless of --jobs.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uinfer/attack.hpp"
#include "uinfer/canary.hpp"
#include "uinfer/corpus.hpp"
#include "uinfer/experiments.hpp"
#include "uinfer/io.hpp"
#include "uinfer/metrics.hpp"
#include "uinfer/ngram.hpp"
#include "uinfer/presets.hpp"
#include "uinfer/remote.hpp"
#include "uinfer/rng.hpp"
#include "uinfer/theory.hpp"

namespace {

using namespace uinfer;

std::vector<double> parse_double_list(const std::string& csv, const char* what) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw CLI::ValidationError(what, "cannot parse \"" + cell + "\" as a number");
    }
  }
  if (out.empty()) throw CLI::ValidationError(what, "empty list");
  return out;
}

std::vector<size_t> parse_size_list(const std::string& csv, const char* what) {
  std::vector<size_t> out;
  for (double v : parse_double_list(csv, what)) {
    if (v < 0 || v != static_cast<double>(static_cast<size_t>(v))) {
      throw CLI::ValidationError(what, "expected non-negative integers");
    }
    out.push_back(static_cast<size_t>(v));
  }
  return out;
}

std::pair<size_t, size_t> parse_range(const std::string& text, const char* what) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      const size_t v = std::stoull(text);
      return {v, v};
    }
    const size_t lo = std::stoull(text.substr(0, colon));
    const size_t hi = std::stoull(text.substr(colon + 1));
    if (lo > hi) throw CLI::ValidationError(what, "range low exceeds high");
    return {lo, hi};
  } catch (const CLI::ValidationError&) {
    throw;
  } catch (const std::exception&) {
    throw CLI::ValidationError(what, "expected N or LO:HI, got \"" + text + "\"");
  }
}

// Flags shared by attack / sweep / compare subcommands; assembled into an
// ExperimentConfig after parsing.
struct CommonFlags {
  std::string corpus_path;
  size_t synth_users = 200;
  std::string synth_docs = "30";
  std::string synth_len = "20:40";
  size_t synth_vocab = 200;
  double synth_perturbation = 50.0;
  size_t signature_len = 10;
  double signature_prob = 1.0;
  size_t duplication_factor = 1;
  double held_in_frac = 0.5;
  double attacker_frac = 0.1;
  double validation_frac = 0.1;
  int order = 3;
  double alpha = 0.01;
  bool no_eos = false;
  double fit_lambda = 1.0;
  std::string reference = "auto";
  std::string aggregation = "mean";
  bool length_normalize = false;
  size_t m_limit = 0;
  std::string fpr_grid = "0.001,0.005,0.01,0.05,0.1";
  size_t bootstrap_b = 100;
  uint64_t seed = 0;
  int jobs = 1;
  std::string out_dir;

  ExperimentConfig to_config() const {
    ExperimentConfig config;
    config.corpus_path = corpus_path;
    if (config.use_synthetic()) {
      config.synth.n_users = synth_users;
      std::tie(config.synth.docs_per_user_min, config.synth.docs_per_user_max) =
          parse_range(synth_docs, "--synth-docs");
      std::tie(config.synth.doc_len_min, config.synth.doc_len_max) =
          parse_range(synth_len, "--synth-len");
      if (synth_vocab < 1) throw CLI::ValidationError("--synth-vocab", "must be positive");
      config.synth.base_dist.assign(synth_vocab, 1.0 / static_cast<double>(synth_vocab));
      config.synth.perturbation = synth_perturbation;
      config.synth.signature_len = signature_len;
      config.synth.signature_prob = signature_len > 0 ? signature_prob : 0.0;
    }
    config.duplication_factor = duplication_factor;
    config.held_in_frac = held_in_frac;
    config.attacker_frac = attacker_frac;
    config.validation_frac = validation_frac;
    config.order = order;
    config.alpha = alpha;
    config.eos_enabled = !no_eos;
    config.fit_lambda = fit_lambda;
    if (reference != "auto") config.reference_source = reference_source_from_name(reference);
    config.aggregation = aggregation_from_name(aggregation);
    config.length_normalize = length_normalize;
    if (m_limit > 0) config.m_limit = m_limit;
    config.fpr_grid = parse_double_list(fpr_grid, "--fpr-grid");
    config.bootstrap_B = bootstrap_b;
    config.seed = seed;
    config.jobs = jobs;
    config.out_dir = out_dir;
    return config;
  }
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags, bool with_out_dir = true) {
  cmd->add_option("--corpus", flags.corpus_path,
                  "corpus directory (vocab.tsv + docs.jsonl); omit to generate synthetically");
  cmd->add_option("--synth-users", flags.synth_users, "synthetic: number of users")
      ->capture_default_str();
  cmd->add_option("--synth-docs", flags.synth_docs, "synthetic: docs per user, N or LO:HI")
      ->capture_default_str();
  cmd->add_option("--synth-len", flags.synth_len, "synthetic: words per doc, N or LO:HI")
      ->capture_default_str();
  cmd->add_option("--synth-vocab", flags.synth_vocab, "synthetic: word types (uniform base)")
      ->capture_default_str();
  cmd->add_option("--synth-perturbation", flags.synth_perturbation,
                  "synthetic: per-user Dirichlet concentration multiplier")
      ->capture_default_str();
  cmd->add_option("--signature-len", flags.signature_len,
                  "synthetic: per-user signature length in tokens (0 disables)")
      ->capture_default_str();
  cmd->add_option("--signature-prob", flags.signature_prob,
                  "synthetic: probability a doc carries the signature")
      ->capture_default_str();
  cmd->add_option("--duplication-factor", flags.duplication_factor,
                  "inject within-user duplicates (1 = none)")
      ->capture_default_str();
  cmd->add_option("--held-in-frac", flags.held_in_frac, "fraction of users held in")
      ->capture_default_str();
  cmd->add_option("--attacker-frac", flags.attacker_frac,
                  "fraction of each user's docs reserved for the attacker")
      ->capture_default_str();
  cmd->add_option("--validation-frac", flags.validation_frac,
                  "fraction of each user's docs reserved for validation")
      ->capture_default_str();
  cmd->add_option("--order", flags.order, "n-gram order")->capture_default_str();
  cmd->add_option("--alpha", flags.alpha, "add-alpha smoothing")->capture_default_str();
  cmd->add_flag("--no-eos", flags.no_eos, "disable EOS in training and scoring");
  cmd->add_option("--lambda", flags.fit_lambda,
                  "fit strength: 0 = reference only, 1 = fully fit target")
      ->capture_default_str();
  cmd->add_option("--reference", flags.reference,
                  "reference model source: auto|synthetic-fresh|validation-slice")
      ->capture_default_str();
  cmd->add_option("--aggregation", flags.aggregation, "per-user aggregation: mean|min|max")
      ->capture_default_str();
  cmd->add_flag("--length-normalize", flags.length_normalize,
                "divide per-doc scores by token count");
  cmd->add_option("--m-limit", flags.m_limit, "cap on attacker docs per user (0 = all)")
      ->capture_default_str();
  cmd->add_option("--fpr-grid", flags.fpr_grid,
                  "comma list of FPR targets (preset \"table7-fpr-grid\" is the default)")
      ->capture_default_str();
  cmd->add_option("--bootstrap-b", flags.bootstrap_b, "bootstrap resamples")
      ->capture_default_str();
  cmd->add_option("--seed", flags.seed, "master seed (required; never defaulted)")->required();
  cmd->add_option("--jobs", flags.jobs, "worker threads; output is identical for any value")
      ->capture_default_str();
  if (with_out_dir) {
    cmd->add_option("--out-dir", flags.out_dir,
                    "write config.json, scores.csv, roc.csv, report.json here");
  }
}

void print_report_summary(const AuditReport& report) {
  std::ostringstream line;
  line << "auroc=" << float17(report.auroc_value);
  if (report.bootstrap.B > 0) {
    line << " bootstrap_mean=" << float17(report.bootstrap.mean)
         << " bootstrap_std=" << float17(report.bootstrap.std_dev);
  }
  if (report.gen_gap_defined) line << " generalization_gap=" << float17(report.gen_gap);
  std::cout << line.str() << "\n";
  for (const auto& cell : report.tpr_table) {
    std::cout << "tpr@fpr=" << float17(cell.fpr_target) << " " << float17(cell.tpr)
              << (cell.resolution_ok ? "" : " (insufficient held-out resolution)") << "\n";
  }
}

// --- subcommand runners -------------------------------------------------------

struct IngestArgs {
  std::string input;
  std::string out_dir;
  size_t min_token_freq = 1;
  size_t min_docs = 1;
  std::string min_docs_preset;
};

int run_ingest(const IngestArgs& args) {
  auto ingested = ingest_jsonl(args.input);
  if (ingested.skipped_empty > 0) {
    std::cerr << "warning: skipped " << ingested.skipped_empty << " empty-text lines\n";
  }
  auto tokenized = build_vocab_and_tokenize(ingested.corpus, args.min_token_freq);
  if (tokenized.dropped_docs > 0) {
    std::cerr << "warning: dropped " << tokenized.dropped_docs
              << " documents that tokenized to only EOS\n";
  }
  Corpus corpus = std::move(tokenized.corpus);
  size_t min_docs = args.min_docs;
  if (!args.min_docs_preset.empty()) {
    min_docs = static_cast<size_t>(presets::min_docs_for(args.min_docs_preset));
  }
  if (min_docs > 1) {
    auto [filtered, report] = filter_min_docs(corpus, min_docs);
    corpus = std::move(filtered);
    std::cerr << "filtered " << report.removed_users.size() << " users below " << min_docs
              << " docs\n";
  }
  corpus.check_invariants();
  save_corpus(corpus, args.out_dir);
  const CorpusStats stats = summary_stats(corpus);
  std::cout << "users=" << stats.n_users << " examples=" << stats.n_examples
            << " vocab=" << corpus.vocab.size() << "\n";
  return 0;
}

int run_stats(const std::string& corpus_dir, bool as_json) {
  const Corpus corpus = load_corpus(corpus_dir);
  const CorpusStats stats = summary_stats(corpus);
  if (as_json) {
    JsonWriter w;
    w.begin_object();
    w.kv("n_users", stats.n_users);
    w.kv("n_examples", stats.n_examples);
    w.key("percentiles_examples_per_user").begin_object();
    w.kv("p0", stats.p0).kv("p25", stats.p25).kv("p50", stats.p50).kv("p75", stats.p75);
    w.kv("p100", stats.p100);
    w.end_object();
    w.end_object();
    std::cout << w.str() << "\n";
  } else {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%8s %10s %6s %6s %6s %6s %6s", "#Users", "#Examples", "P0",
                  "P25", "P50", "P75", "P100");
    std::cout << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%8zu %10zu %6zu %6zu %6zu %6zu %6zu", stats.n_users,
                  stats.n_examples, stats.p0, stats.p25, stats.p50, stats.p75, stats.p100);
    std::cout << buf << "\n";
  }
  return 0;
}

struct TheoryArgs {
  size_t instances = 1000;
  uint64_t seed = 0;
  std::string out;
  uint32_t alphabet_min = 2, alphabet_max = 10;
  size_t users_min = 2, users_max = 10;
};

int run_theory_prop1(const TheoryArgs& args) {
  Rng rng(derive_seed(args.seed, "prop1"));
  std::string jsonl;
  size_t violations = 0;
  for (size_t i = 0; i < args.instances; ++i) {
    const auto mix =
        random_mixture(rng, args.alphabet_min, args.alphabet_max, args.users_min, args.users_max);
    const size_t u = rng.index(mix.n_users());
    const auto report = verify_prop1(mix, u);
    if (!report.vacuous && !report.holds) ++violations;
    JsonWriter w;
    w.begin_object();
    w.kv("instance", i);
    w.kv("alphabet", static_cast<uint64_t>(mix.alphabet_size));
    w.kv("users", mix.n_users());
    w.kv("user", report.user);
    w.kv("lower", report.lower);
    w.kv("value", report.value);
    w.kv("upper", report.upper);
    w.kv("holds", report.holds);
    w.kv("vacuous", report.vacuous);
    w.end_object();
    jsonl += w.str();
    jsonl += '\n';
  }
  if (args.out.empty()) {
    std::cout << jsonl;
  } else {
    write_file(args.out, jsonl);
  }
  std::cerr << (args.instances - violations) << "/" << args.instances << " instances hold\n";
  return violations == 0 ? 0 : 2;
}

int run_theory_prop2(const TheoryArgs& args) {
  Rng rng(derive_seed(args.seed, "prop2"));
  std::string jsonl;
  size_t violations = 0;
  for (size_t i = 0; i < args.instances; ++i) {
    const uint32_t v =
        args.alphabet_min + static_cast<uint32_t>(rng.index(args.alphabet_max - args.alphabet_min + 1));
    const std::vector<double> ones(v, 1.0);
    const auto p = rng.dirichlet(ones);
    const auto q = rng.dirichlet(ones);
    const auto [lam, mu] = draw_mixing_coefficients(rng, i);
    const auto report = verify_prop2(p, q, lam, mu);
    if (!report.holds) ++violations;
    JsonWriter w;
    w.begin_object();
    w.kv("instance", i);
    w.kv("alphabet", static_cast<uint64_t>(v));
    w.kv("lam", lam);
    w.kv("mu", mu);
    w.kv("kl_before", report.kl_before);
    w.kv("kl_after", report.kl_after);
    w.kv("holds", report.holds);
    w.end_object();
    jsonl += w.str();
    jsonl += '\n';
  }
  if (args.out.empty()) {
    std::cout << jsonl;
  } else {
    write_file(args.out, jsonl);
  }
  std::cerr << (args.instances - violations) << "/" << args.instances << " instances hold\n";
  return violations == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "uinfer: user-inference privacy audit for count-based language models.\n"
      "Presets: table7-fpr-grid, knowledge-grid {1,5,10,50}, cap-grid {5,25,50,100},\n"
      "canary-180, dp-delta 1e-6, min-docs presets arxiv=20 reddit=100 ccnews=30 enron=150."};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML-style config file; CLI flags override file values");
  app.fallthrough();  // lets --config appear after the subcommand name too
  app.get_formatter()->column_width(34);

  // ingest
  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "ingest JSONL, tokenize, build vocab, save corpus");
  ingest->add_option("--input", ingest_args.input, "JSONL with \"user\" and \"text\" per line")
      ->required();
  ingest->add_option("--out-dir", ingest_args.out_dir, "corpus output directory")->required();
  ingest->add_option("--min-token-freq", ingest_args.min_token_freq,
                     "tokens rarer than this map to UNK")
      ->capture_default_str();
  ingest->add_option("--min-docs", ingest_args.min_docs, "drop users with fewer documents")
      ->capture_default_str();
  ingest->add_option("--min-docs-preset", ingest_args.min_docs_preset,
                     "dataset preset for --min-docs: arxiv|reddit|ccnews|enron");

  // stats
  std::string stats_corpus;
  bool stats_json = false;
  auto* stats_cmd = app.add_subcommand("stats", "dataset summary table (users, examples, percentiles)");
  stats_cmd->add_option("--corpus", stats_corpus, "corpus directory")->required();
  stats_cmd->add_flag("--json", stats_json, "emit JSON instead of the aligned table");

  // split
  struct {
    std::string corpus, out;
    double held_in = 0.5, attacker = 0.1, validation = 0.1;
    uint64_t seed = 0;
  } split_args;
  auto* split_cmd = app.add_subcommand("split", "make a held-in/held-out split with reservations");
  split_cmd->add_option("--corpus", split_args.corpus)->required();
  split_cmd->add_option("--out", split_args.out, "split.json path")->required();
  split_cmd->add_option("--held-in-frac", split_args.held_in)->capture_default_str();
  split_cmd->add_option("--attacker-frac", split_args.attacker)->capture_default_str();
  split_cmd->add_option("--validation-frac", split_args.validation)->capture_default_str();
  split_cmd->add_option("--seed", split_args.seed)->required();

  // dedup
  struct {
    std::string corpus, out_dir, report;
  } dedup_args;
  auto* dedup_cmd = app.add_subcommand("dedup", "remove exact within-user duplicate texts");
  dedup_cmd->add_option("--corpus", dedup_args.corpus)->required();
  dedup_cmd->add_option("--out-dir", dedup_args.out_dir)->required();
  dedup_cmd->add_option("--report", dedup_args.report, "write a JSON dedup report here");

  // cap
  struct {
    std::string corpus, out_dir;
    size_t cap = 0;
    uint64_t seed = 0;
  } cap_args;
  auto* cap_cmd = app.add_subcommand("cap", "cap documents per user by seeded subsampling");
  cap_cmd->add_option("--corpus", cap_args.corpus)->required();
  cap_cmd->add_option("--out-dir", cap_args.out_dir)->required();
  cap_cmd->add_option("--cap", cap_args.cap)->required();
  cap_cmd->add_option("--seed", cap_args.seed)->required();

  // train
  struct {
    std::string corpus, split, out_dir;
    int order = 3;
    double alpha = 0.01;
    bool no_eos = false;
  } train_args;
  auto* train_cmd = app.add_subcommand("train", "train the target n-gram on fine-tune docs");
  train_cmd->add_option("--corpus", train_args.corpus)->required();
  train_cmd->add_option("--split", train_args.split)->required();
  train_cmd->add_option("--out-dir", train_args.out_dir)->required();
  train_cmd->add_option("--order", train_args.order)->capture_default_str();
  train_cmd->add_option("--alpha", train_args.alpha)->capture_default_str();
  train_cmd->add_flag("--no-eos", train_args.no_eos);

  // dp-train
  struct {
    std::string corpus, split, out_dir;
    int order = 3;
    double alpha = 0.01;
    double clip = 1.0, sigma = 1.0, delta = presets::kDpDelta;
    uint64_t seed = 0;
  } dp_args;
  auto* dp_cmd = app.add_subcommand(
      "dp-train", "train with clipped per-example count release + Gaussian noise (zCDP epsilon)");
  dp_cmd->add_option("--corpus", dp_args.corpus)->required();
  dp_cmd->add_option("--split", dp_args.split)->required();
  dp_cmd->add_option("--out-dir", dp_args.out_dir)->required();
  dp_cmd->add_option("--order", dp_args.order)->capture_default_str();
  dp_cmd->add_option("--alpha", dp_args.alpha)->capture_default_str();
  dp_cmd->add_option("--clip", dp_args.clip, "max L2 of one document's count increment")
      ->capture_default_str();
  dp_cmd->add_option("--sigma", dp_args.sigma, "noise stddev per released count")
      ->capture_default_str();
  dp_cmd->add_option("--delta", dp_args.delta, "DP delta (preset dp-delta = 1e-6)")
      ->capture_default_str();
  dp_cmd->add_option("--seed", dp_args.seed)->required();

  // attack
  CommonFlags attack_flags;
  struct {
    std::string split, target, ref, remote_target, remote_ref;
    int remote_timeout = 10, remote_retries = 2;
  } attack_extra;
  auto* attack_cmd = app.add_subcommand(
      "attack", "end-to-end attack: corpus -> split -> train -> score -> metrics");
  add_common_flags(attack_cmd, attack_flags);
  attack_cmd->add_option("--split", attack_extra.split,
                         "use this split.json instead of deriving one (needs --corpus)");
  attack_cmd->add_option("--target", attack_extra.target, "score with this saved model dir");
  attack_cmd->add_option("--ref", attack_extra.ref, "reference model dir (with --target)");
  attack_cmd->add_option("--remote-target", attack_extra.remote_target,
                         "score against a remote provider, HOST:PORT");
  attack_cmd->add_option("--remote-ref", attack_extra.remote_ref,
                         "remote reference provider, HOST:PORT");
  attack_cmd->add_option("--remote-timeout", attack_extra.remote_timeout, "seconds per request")
      ->capture_default_str();
  attack_cmd->add_option("--remote-retries", attack_extra.remote_retries, "retries per request")
      ->capture_default_str();

  // eval
  struct {
    std::string scores, out;
    std::string fpr = "0.001,0.005,0.01,0.05,0.1";
    size_t bootstrap_b = 0;
    uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 1;
  } eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "metrics from an exported scores.csv");
  eval_cmd->add_option("--scores", eval_args.scores)->required();
  eval_cmd->add_option("--fpr", eval_args.fpr, "comma list of FPR targets (table7-fpr-grid)")
      ->capture_default_str();
  eval_cmd->add_option("--bootstrap-b", eval_args.bootstrap_b,
                       "bootstrap resamples (0 disables; requires --seed)")
      ->capture_default_str();
  auto* eval_seed =
      eval_cmd->add_option("--seed", eval_args.seed, "seed for the bootstrap (required with it)");
  eval_cmd->add_option("--jobs", eval_args.jobs)->capture_default_str();
  eval_cmd->add_option("--out", eval_args.out, "write report JSON here");

  // canary
  struct {
    std::string corpus, out_dir, registry;
    std::string lengths = "1,5,10,50";
    size_t per_length = 1;
    uint64_t seed = 0;
    std::string preset;
  } canary_args;
  auto* canary_cmd =
      app.add_subcommand("canary", "inject synthetic canary users (shared-substring construction)");
  canary_cmd->add_option("--corpus", canary_args.corpus)->required();
  canary_cmd->add_option("--out-dir", canary_args.out_dir)->required();
  canary_cmd->add_option("--registry", canary_args.registry, "write the canary registry JSON here");
  canary_cmd->add_option("--lengths", canary_args.lengths, "comma list of substring lengths")
      ->capture_default_str();
  canary_cmd->add_option("--per-length", canary_args.per_length)->capture_default_str();
  canary_cmd->add_option("--preset", canary_args.preset,
                         "\"canary-180\": 180 canaries over lengths 1-100");
  canary_cmd->add_option("--seed", canary_args.seed)->required();

  // synth
  CommonFlags synth_flags;
  std::string synth_out_dir;
  auto* synth_cmd = app.add_subcommand("synth", "generate and save a synthetic corpus");
  synth_cmd->add_option("--synth-users", synth_flags.synth_users)->capture_default_str();
  synth_cmd->add_option("--synth-docs", synth_flags.synth_docs)->capture_default_str();
  synth_cmd->add_option("--synth-len", synth_flags.synth_len)->capture_default_str();
  synth_cmd->add_option("--synth-vocab", synth_flags.synth_vocab)->capture_default_str();
  synth_cmd->add_option("--synth-perturbation", synth_flags.synth_perturbation)
      ->capture_default_str();
  synth_cmd->add_option("--signature-len", synth_flags.signature_len)->capture_default_str();
  synth_cmd->add_option("--signature-prob", synth_flags.signature_prob)->capture_default_str();
  synth_cmd->add_option("--out-dir", synth_out_dir)->required();
  synth_cmd->add_option("--seed", synth_flags.seed)->required();

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "experiment sweeps");
  sweep_cmd->require_subcommand(1);
  CommonFlags sweep_flags;

  std::string m_grid_text = "1,5,10,50";
  size_t knowledge_draws = 100;
  auto* sweep_knowledge =
      sweep_cmd->add_subcommand("knowledge", "attacker-knowledge sweep over m (knowledge-grid)");
  add_common_flags(sweep_knowledge, sweep_flags);
  sweep_knowledge->add_option("--m-grid", m_grid_text, "comma list of m values")
      ->capture_default_str();
  sweep_knowledge->add_option("--draws", knowledge_draws, "attacker-doc draws per m")
      ->capture_default_str();

  std::string canary_lengths_text = "1,5,10,50";
  size_t canary_per_length = 5;
  std::string canary_preset;
  auto* sweep_canary =
      sweep_cmd->add_subcommand("canary", "canary AUROC by shared-substring length");
  add_common_flags(sweep_canary, sweep_flags);
  sweep_canary->add_option("--lengths", canary_lengths_text)->capture_default_str();
  sweep_canary->add_option("--per-length", canary_per_length)->capture_default_str();
  sweep_canary->add_option("--preset", canary_preset, "\"canary-180\"");

  std::string cap_grid_text = "5,25,50,100";
  bool cap_with_canaries = false;
  std::string cap_canary_lengths = "10";
  size_t cap_canary_per_length = 5;
  auto* sweep_cap = sweep_cmd->add_subcommand(
      "cap", "per-user data-limit sweep (cap-grid preset {5,25,50,100})");
  add_common_flags(sweep_cap, sweep_flags);
  sweep_cap->add_option("--cap-grid", cap_grid_text)->capture_default_str();
  sweep_cap->add_flag("--with-canaries", cap_with_canaries,
                      "limit canary users' fine-tune contribution instead of capping everyone");
  sweep_cap->add_option("--canary-lengths", cap_canary_lengths)->capture_default_str();
  sweep_cap->add_option("--canary-per-length", cap_canary_per_length)->capture_default_str();

  std::string lambda_grid_text = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0";
  auto* sweep_lambda = sweep_cmd->add_subcommand(
      "lambda", "fit-strength sweep: AUROC + generalization gap + Spearman");
  add_common_flags(sweep_lambda, sweep_flags);
  sweep_lambda->add_option("--lambda-grid", lambda_grid_text)->capture_default_str();

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "mitigation comparisons");
  compare_cmd->require_subcommand(1);
  CommonFlags compare_flags;

  auto* compare_dedup_cmd =
      compare_cmd->add_subcommand("dedup", "attack with vs without within-user dedup");
  add_common_flags(compare_dedup_cmd, compare_flags);

  std::string sigma_grid_text;
  std::string epsilon_grid_text = "2,8,32";
  double dp_clip = 1.0, dp_delta = presets::kDpDelta;
  auto* compare_dp_cmd = compare_cmd->add_subcommand(
      "dp", "DP-noised training across a sigma grid (epsilon, auroc, val loss)");
  add_common_flags(compare_dp_cmd, compare_flags);
  compare_dp_cmd->add_option("--sigma-grid", sigma_grid_text, "comma list of noise sigmas");
  compare_dp_cmd->add_option("--epsilon-grid", epsilon_grid_text,
                             "comma list of target epsilons (converted to sigmas)")
      ->capture_default_str();
  compare_dp_cmd->add_option("--clip", dp_clip)->capture_default_str();
  compare_dp_cmd->add_option("--delta", dp_delta, "preset dp-delta = 1e-6")->capture_default_str();

  // theory
  auto* theory_cmd = app.add_subcommand("theory", "exact verification on finite mixtures");
  theory_cmd->require_subcommand(1);
  TheoryArgs theory_args;
  auto* prop1_cmd = theory_cmd->add_subcommand(
      "prop1", "bounds log(a_u)+KL < mean statistic <= a_u*chi2 on random mixtures");
  prop1_cmd->add_option("--instances", theory_args.instances)->capture_default_str();
  prop1_cmd->add_option("--seed", theory_args.seed)->required();
  prop1_cmd->add_option("--out", theory_args.out, "JSONL output (default stdout)");
  prop1_cmd->add_option("--alphabet-min", theory_args.alphabet_min)->capture_default_str();
  prop1_cmd->add_option("--alphabet-max", theory_args.alphabet_max)->capture_default_str();
  prop1_cmd->add_option("--users-min", theory_args.users_min)->capture_default_str();
  prop1_cmd->add_option("--users-max", theory_args.users_max)->capture_default_str();
  auto* prop2_cmd = theory_cmd->add_subcommand(
      "prop2", "mixing contracts KL over the mislabeling regime lam+mu >= 1 incl. boundaries");
  prop2_cmd->add_option("--instances", theory_args.instances)->capture_default_str();
  prop2_cmd->add_option("--seed", theory_args.seed)->required();
  prop2_cmd->add_option("--out", theory_args.out)->capture_default_str();
  prop2_cmd->add_option("--alphabet-min", theory_args.alphabet_min)->capture_default_str();
  prop2_cmd->add_option("--alphabet-max", theory_args.alphabet_max)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // help text, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage errors are always exit 1
  }

  try {
    if (*ingest) return run_ingest(ingest_args);
    if (*stats_cmd) return run_stats(stats_corpus, stats_json);

    if (*split_cmd) {
      const Corpus corpus = load_corpus(split_args.corpus);
      const SplitPlan split = make_split(corpus, split_args.held_in, split_args.attacker,
                                         split_args.validation, split_args.seed);
      save_split(split, split_args.out);
      std::cout << "held_in=" << split.held_in.size() << " held_out=" << split.held_out.size()
                << "\n";
      return 0;
    }

    if (*dedup_cmd) {
      const Corpus corpus = load_corpus(dedup_args.corpus);
      auto [deduped, report] = dedup_within_user(corpus);
      save_corpus(deduped, dedup_args.out_dir);
      if (!dedup_args.report.empty()) {
        JsonWriter w;
        w.begin_object();
        w.kv("total_removed", report.total_removed);
        w.key("removed_per_user").begin_object();
        for (const auto& [uid, n] : report.removed_per_user) w.kv(uid, n);
        w.end_object();
        w.key("top_duplicates").begin_array();
        for (const auto& [text, n] : report.top_duplicates) {
          w.begin_object().kv("text", text).kv("extra_copies", n).end_object();
        }
        w.end_array();
        w.end_object();
        write_file(dedup_args.report, w.str() + "\n");
      }
      std::cout << "removed=" << report.total_removed << "\n";
      return 0;
    }

    if (*cap_cmd) {
      const Corpus corpus = load_corpus(cap_args.corpus);
      save_corpus(cap_per_user(corpus, cap_args.cap, cap_args.seed), cap_args.out_dir);
      return 0;
    }

    if (*train_cmd) {
      const Corpus corpus = load_corpus(train_args.corpus);
      const SplitPlan split = load_split(train_args.split);
      const NGramModel model =
          train_ngram(corpus, split, train_args.order, train_args.alpha, !train_args.no_eos);
      save_model(model, train_args.out_dir);
      std::cout << "trained_on=" << model.trained_on().size() << " docs\n";
      return 0;
    }

    if (*dp_cmd) {
      const Corpus corpus = load_corpus(dp_args.corpus);
      const SplitPlan split = load_split(dp_args.split);
      const DpTrainConfig cfg{dp_args.clip, dp_args.sigma, dp_args.delta};
      const DpTrainResult result =
          train_dp_ngram(corpus, split, dp_args.order, dp_args.alpha, cfg, dp_args.seed);
      if (!result.warning.empty()) std::cerr << "warning: " << result.warning << "\n";
      save_model(result.model, dp_args.out_dir, &cfg, result.epsilon);
      std::cout << "epsilon=" << float17(result.epsilon) << "\n";
      return 0;
    }

    if (*attack_cmd) {
      ExperimentConfig config = attack_flags.to_config();
      const bool scoring_mode = !attack_extra.target.empty() ||
                                !attack_extra.remote_target.empty();
      if (!scoring_mode) {
        const AuditReport report = run_attack(config);
        print_report_summary(report);
        return 0;
      }

      if (config.corpus_path.empty())
        throw std::runtime_error("--target/--remote-target scoring needs --corpus");
      if (attack_extra.split.empty())
        throw std::runtime_error("--target/--remote-target scoring needs --split");
      const Corpus corpus = load_corpus(config.corpus_path);
      const SplitPlan split = load_split(attack_extra.split);

      auto parse_hostport = [](const std::string& text) {
        const auto colon = text.rfind(':');
        if (colon == std::string::npos)
          throw std::runtime_error("expected HOST:PORT, got \"" + text + "\"");
        return std::make_pair(text.substr(0, colon), std::stoi(text.substr(colon + 1)));
      };
      std::unique_ptr<ScoringModel> target, ref;
      if (!attack_extra.remote_target.empty()) {
        auto [host, port] = parse_hostport(attack_extra.remote_target);
        target = std::make_unique<RemoteScoringModel>(host, port, corpus.vocab.size(),
                                                      attack_extra.remote_timeout,
                                                      attack_extra.remote_retries);
      } else {
        target = std::make_unique<NGramModel>(load_model(attack_extra.target));
      }
      if (!attack_extra.remote_ref.empty()) {
        auto [host, port] = parse_hostport(attack_extra.remote_ref);
        ref = std::make_unique<RemoteScoringModel>(host, port, corpus.vocab.size(),
                                                   attack_extra.remote_timeout,
                                                   attack_extra.remote_retries);
      } else {
        if (attack_extra.ref.empty())
          throw std::runtime_error("scoring mode needs --ref or --remote-ref");
        ref = std::make_unique<NGramModel>(load_model(attack_extra.ref));
      }

      const ScoredUsers scores = score_all_users(
          corpus, split, *target, *ref, config.aggregation, config.m_limit,
          derive_seed(config.seed, "attack"), config.jobs, config.length_normalize);
      AuditReport report =
          evaluate_scores(scores, config.fpr_grid, config.bootstrap_B,
                          derive_seed(config.seed, "bootstrap"), config.jobs,
                          config.histogram_bins);
      report.seeds.master = config.seed;
      report.seeds.attack = derive_seed(config.seed, "attack");
      report.seeds.bootstrap = derive_seed(config.seed, "bootstrap");
      if (!config.out_dir.empty()) {
        const std::filesystem::path dir(config.out_dir);
        write_file(dir / "scores.csv", scores_to_csv(scores));
        write_file(dir / "roc.csv", roc_to_csv(report.roc));
        write_report_json(report, dir / "report.json");
      }
      print_report_summary(report);
      return 0;
    }

    if (*eval_cmd) {
      if (eval_args.bootstrap_b > 0 && eval_seed->count() == 0) {
        std::cerr << "--bootstrap-b requires --seed\n";
        return 1;
      }
      const ScoredUsers scores = scores_from_csv(read_file(eval_args.scores));
      const auto fprs = parse_double_list(eval_args.fpr, "--fpr");
      AuditReport report = evaluate_scores(scores, fprs, eval_args.bootstrap_b,
                                           derive_seed(eval_args.seed, "bootstrap"),
                                           eval_args.jobs, 20);
      report.seeds.master = eval_args.seed;
      if (!eval_args.out.empty()) write_report_json(report, eval_args.out);
      print_report_summary(report);
      return 0;
    }

    if (*canary_cmd) {
      const Corpus corpus = load_corpus(canary_args.corpus);
      CanarySpec spec;
      if (canary_args.preset == "canary-180") {
        spec.lengths = presets::kCanary180Lengths;
        spec.per_length = presets::kCanary180PerLength;
      } else if (!canary_args.preset.empty()) {
        throw std::runtime_error("unknown canary preset \"" + canary_args.preset + "\"");
      } else {
        spec.lengths = parse_size_list(canary_args.lengths, "--lengths");
        spec.per_length = canary_args.per_length;
      }
      spec.seed = canary_args.seed;
      const auto result = make_canaries(corpus, spec);
      save_corpus(result.corpus, canary_args.out_dir);
      if (!canary_args.registry.empty()) save_canary_registry(result.registry, canary_args.registry);
      std::cout << "canaries=" << result.registry.size() << "\n";
      return 0;
    }

    if (*synth_cmd) {
      ExperimentConfig config = synth_flags.to_config();
      const Corpus corpus =
          generate_synthetic_corpus(config.synth, derive_seed(config.seed, "corpus"));
      save_corpus(corpus, synth_out_dir);
      const CorpusStats stats = summary_stats(corpus);
      std::cout << "users=" << stats.n_users << " examples=" << stats.n_examples << "\n";
      return 0;
    }

    if (*sweep_knowledge) {
      const ExperimentConfig config = sweep_flags.to_config();
      const auto rows = sweep_attacker_knowledge(
          config, parse_size_list(m_grid_text, "--m-grid"), knowledge_draws);
      const std::string csv = knowledge_rows_to_csv(rows);
      if (!config.out_dir.empty()) {
        write_file(std::filesystem::path(config.out_dir) / "sweep.csv", csv);
        write_config_json(config, SeedEcho{config.seed},
                          std::filesystem::path(config.out_dir) / "config.json");
      }
      std::cout << csv;
      return 0;
    }

    if (*sweep_canary) {
      const ExperimentConfig config = sweep_flags.to_config();
      CanarySpec spec;
      if (canary_preset == "canary-180") {
        spec.lengths = presets::kCanary180Lengths;
        spec.per_length = presets::kCanary180PerLength;
      } else {
        spec.lengths = parse_size_list(canary_lengths_text, "--lengths");
        spec.per_length = canary_per_length;
      }
      const auto result = sweep_canaries(config, spec);
      const std::string csv = canary_sweep_to_csv(result);
      if (!config.out_dir.empty()) {
        const std::filesystem::path dir(config.out_dir);
        write_file(dir / "sweep.csv", csv);
        write_config_json(config, seeds_for(config), dir / "config.json");
      }
      std::cout << csv;
      return 0;
    }

    if (*sweep_cap) {
      ExperimentConfig config = sweep_flags.to_config();
      if (cap_with_canaries) {
        CanarySpec spec;
        spec.lengths = parse_size_list(cap_canary_lengths, "--canary-lengths");
        spec.per_length = cap_canary_per_length;
        config.canary = spec;
      }
      const auto rows = sweep_data_cap(config, parse_size_list(cap_grid_text, "--cap-grid"));
      const std::string csv = cap_rows_to_csv(rows);
      if (!config.out_dir.empty()) {
        const std::filesystem::path dir(config.out_dir);
        write_file(dir / "sweep.csv", csv);
        write_config_json(config, seeds_for(config), dir / "config.json");
      }
      std::cout << csv;
      return 0;
    }

    if (*sweep_lambda) {
      const ExperimentConfig config = sweep_flags.to_config();
      const auto result =
          sweep_fit_strength(config, parse_double_list(lambda_grid_text, "--lambda-grid"));
      const std::string csv = lambda_rows_to_csv(result);
      if (!config.out_dir.empty()) {
        const std::filesystem::path dir(config.out_dir);
        write_file(dir / "sweep.csv", csv);
        write_config_json(config, seeds_for(config), dir / "config.json");
      }
      std::cout << csv;
      std::cerr << "spearman(gap,auroc)=" << float17(result.spearman_gap_auroc)
                << " lambda95=" << float17(result.lambda_95) << "\n";
      return 0;
    }

    if (*compare_dedup_cmd) {
      const ExperimentConfig config = compare_flags.to_config();
      const auto result = compare_dedup(config);
      std::string csv = "variant,auroc,bootstrap_mean,bootstrap_std\n";
      csv += "raw," + float17(result.raw.auroc_value) + "," +
             float17(result.raw.bootstrap.mean) + "," + float17(result.raw.bootstrap.std_dev) +
             "\n";
      csv += "deduped," + float17(result.deduped.auroc_value) + "," +
             float17(result.deduped.bootstrap.mean) + "," +
             float17(result.deduped.bootstrap.std_dev) + "\n";
      if (!config.out_dir.empty()) {
        const std::filesystem::path dir(config.out_dir);
        write_file(dir / "sweep.csv", csv);
        write_config_json(config, seeds_for(config), dir / "config.json");
      }
      std::cout << csv;
      std::cerr << "duplicates_removed=" << result.duplicates_removed << "\n";
      return 0;
    }

    if (*compare_dp_cmd) {
      const ExperimentConfig config = compare_flags.to_config();
      std::vector<double> sigmas;
      if (!sigma_grid_text.empty()) {
        sigmas = parse_double_list(sigma_grid_text, "--sigma-grid");
      } else {
        for (double eps : parse_double_list(epsilon_grid_text, "--epsilon-grid")) {
          sigmas.push_back(dp_sigma_for_epsilon(eps, dp_clip, dp_delta));
        }
      }
      const auto rows = compare_dp(config, sigmas, dp_clip, dp_delta);
      const std::string csv = dp_rows_to_csv(rows);
      if (!config.out_dir.empty()) {
        const std::filesystem::path dir(config.out_dir);
        write_file(dir / "sweep.csv", csv);
        write_config_json(config, seeds_for(config), dir / "config.json");
      }
      std::cout << csv;
      return 0;
    }

    if (*prop1_cmd) return run_theory_prop1(theory_args);
    if (*prop2_cmd) return run_theory_prop2(theory_args);

    std::cerr << "no subcommand selected\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
