#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "uinfer/attack.hpp"
#include "uinfer/canary.hpp"
#include "uinfer/corpus.hpp"
#include "uinfer/metrics.hpp"
#include "uinfer/ngram.hpp"

namespace uinfer {

enum class ReferenceSource {
  kSyntheticFresh,    // reference trained on a fresh corpus from the same generator
  kValidationSlice,   // reference trained on all users' validation docs
};

std::string reference_source_name(ReferenceSource s);
ReferenceSource reference_source_from_name(const std::string& name);

// One experiment run. The master seed is the only seed a caller supplies;
// every stage draws from a stream derived from it, and the derived seeds
// are echoed into config.json so any stage can be reproduced standalone.
struct ExperimentConfig {
  // corpus source: a directory saved by save_corpus, or (when empty) the
  // synthetic generator below
  std::string corpus_path;
  SyntheticUserSpec synth;
  size_t duplication_factor = 1;        // >1 injects within-user duplicates
  bool dedup = false;                   // dedup_within_user before splitting
  std::optional<CanarySpec> canary;     // canary users, forced held-in

  double held_in_frac = 0.5;
  double attacker_frac = 0.1;
  double validation_frac = 0.1;

  int order = 3;
  double alpha = 0.01;
  bool eos_enabled = true;
  double fit_lambda = 1.0;
  std::optional<ReferenceSource> reference_source;  // default: fresh for synthetic, validation slice otherwise

  Aggregation aggregation = Aggregation::kMean;
  bool length_normalize = false;
  std::optional<size_t> m_limit;

  std::vector<double> fpr_grid = {0.001, 0.005, 0.01, 0.05, 0.1};
  size_t bootstrap_B = 100;
  size_t histogram_bins = 20;

  uint64_t seed = 0;
  int jobs = 1;
  std::string out_dir;  // empty: nothing written

  bool use_synthetic() const { return corpus_path.empty(); }
  ReferenceSource effective_reference() const {
    if (reference_source) return *reference_source;
    return use_synthetic() ? ReferenceSource::kSyntheticFresh : ReferenceSource::kValidationSlice;
  }
  void validate() const;
};

struct Histogram {
  std::vector<double> edges;      // bins+1 edges
  std::vector<size_t> held_in;    // counts per bin
  std::vector<size_t> held_out;
};

Histogram make_histogram(std::span<const double> held_in, std::span<const double> held_out,
                         size_t bins);

struct TprCell {
  double fpr_target = 0.0;
  double tpr = 0.0;
  bool resolution_ok = true;  // false when held-out count < 1/fpr_target
};

struct SeedEcho {
  uint64_t master = 0;
  uint64_t corpus = 0;
  uint64_t split = 0;
  uint64_t canary = 0;
  uint64_t pretrain = 0;
  uint64_t attack = 0;
  uint64_t bootstrap = 0;
};

// Per-stage seeds derived from the config's master seed (what the
// pipeline actually uses, echoed into config.json).
SeedEcho seeds_for(const ExperimentConfig& config);

struct AuditReport {
  double auroc_value = 0.0;
  std::vector<TprCell> tpr_table;
  BootstrapSummary bootstrap;
  double gen_gap = 0.0;
  bool gen_gap_defined = false;
  ScoredUsers scores;
  RocCurve roc;
  Histogram histogram;
  SeedEcho seeds;
};

// Built pipeline stages, reused by the sweeps so a grid can retrain or
// rescore without regenerating the corpus.
struct Pipeline {
  Corpus corpus;
  SplitPlan split;
  std::vector<CanaryUser> canaries;
  std::shared_ptr<NGramModel> target_raw;
  std::shared_ptr<NGramModel> reference;
  std::shared_ptr<ScoringModel> target;
  SeedEcho seeds;
};

Pipeline build_pipeline(const ExperimentConfig& config);

// Full run: corpus -> split -> train target and reference -> score ->
// metrics; writes config.json/scores.csv/roc.csv/report.json when
// config.out_dir is set.
AuditReport run_attack(const ExperimentConfig& config);

// Metrics for an existing score set (the `eval` entry point).
AuditReport evaluate_scores(const ScoredUsers& scores, const std::vector<double>& fpr_grid,
                            size_t bootstrap_B, uint64_t seed, int jobs, size_t histogram_bins);

// --- sweeps -------------------------------------------------------------------

struct KnowledgeRow {
  size_t m = 0;
  BootstrapSummary over_draws;  // AUROC over seeded attacker-doc draws
  uint64_t seed = 0;
  bool skipped = false;
  std::string warning;
};

std::vector<KnowledgeRow> sweep_attacker_knowledge(const ExperimentConfig& config,
                                                   const std::vector<size_t>& m_grid,
                                                   size_t draws = 100);

struct CanaryRow {
  size_t length = 0;
  size_t n_canaries = 0;
  double canary_auroc = 0.0;
  uint64_t seed = 0;
};

struct CanarySweepResult {
  std::vector<CanaryRow> rows;
  double real_auroc = 0.0;  // held-in real users vs held-out users
};

CanarySweepResult sweep_canaries(const ExperimentConfig& config, const CanarySpec& spec);

struct CapRow {
  size_t cap = 0;
  double auroc_value = 0.0;       // canary AUROC when canaries are present, else real
  double real_auroc = 0.0;
  uint64_t seed = 0;
};

// With canaries configured this is the per-user data-limit mitigation on
// canary users (attacker docs untouched); otherwise cap_per_user runs on
// the whole corpus before splitting.
std::vector<CapRow> sweep_data_cap(const ExperimentConfig& config,
                                   const std::vector<size_t>& cap_grid);

struct LambdaRow {
  double lambda = 0.0;
  double auroc_value = 0.0;
  double gap = 0.0;
};

struct LambdaSweepResult {
  std::vector<LambdaRow> rows;
  double spearman_gap_auroc = 0.0;
  // Smallest grid lambda reaching 95% of the final AUROC: the
  // early-stopping readout on the fit-strength axis.
  double lambda_95 = 0.0;
};

LambdaSweepResult sweep_fit_strength(const ExperimentConfig& config,
                                     const std::vector<double>& lambda_grid);

// --- comparisons -----------------------------------------------------------------

struct DedupCompareResult {
  AuditReport raw;
  AuditReport deduped;
  size_t duplicates_removed = 0;
};

DedupCompareResult compare_dedup(const ExperimentConfig& config);

struct DpRow {
  double sigma = 0.0;
  double epsilon = 0.0;
  double auroc_value = 0.0;
  double val_loss = 0.0;  // held-in users' validation NLL per token
  uint64_t seed = 0;
  std::string warning;
};

std::vector<DpRow> compare_dp(const ExperimentConfig& config, const std::vector<double>& sigma_grid,
                              double clip, double delta);

// --- report files ------------------------------------------------------------------

void write_config_json(const ExperimentConfig& config, const SeedEcho& seeds,
                       const std::filesystem::path& file);
void write_report_json(const AuditReport& report, const std::filesystem::path& file);
std::string knowledge_rows_to_csv(const std::vector<KnowledgeRow>& rows);
std::string canary_sweep_to_csv(const CanarySweepResult& result);
std::string cap_rows_to_csv(const std::vector<CapRow>& rows);
std::string lambda_rows_to_csv(const LambdaSweepResult& result);
std::string dp_rows_to_csv(const std::vector<DpRow>& rows);

}  // namespace uinfer
