#include "uinfer/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "uinfer/io.hpp"
#include "uinfer/rng.hpp"

namespace uinfer {

namespace {

// Sliding context of the previous `size` symbols, BOS-padded.
struct ContextWindow {
  explicit ContextWindow(int size) : buf(static_cast<size_t>(size), NGramModel::kBos) {}
  void push(TokenId t) {
    if (buf.empty()) return;
    buf.erase(buf.begin());
    buf.push_back(t);
  }
  std::vector<TokenId> buf;
};

}  // namespace

NGramModel::NGramModel(int order, double alpha, uint32_t vocab_size, bool eos_enabled)
    : order_(order), alpha_(alpha), vocab_size_(vocab_size), eos_enabled_(eos_enabled) {
  if (order < 1) throw std::invalid_argument("n-gram order must be >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("smoothing alpha must be > 0");
  if (vocab_size == 0) throw std::invalid_argument("vocab_size must be positive");
}

std::span<const TokenId> NGramModel::effective_tokens(std::span<const TokenId> tokens) const {
  if (!eos_enabled_ && !tokens.empty() && tokens.back() == Vocab::kEosId) {
    return tokens.subspan(0, tokens.size() - 1);
  }
  return tokens;
}

void NGramModel::add_sequence(std::span<const TokenId> tokens) {
  const auto seq = effective_tokens(tokens);
  ContextWindow ctx(order_ - 1);
  for (TokenId t : seq) {
    if (t >= vocab_size_)
      throw std::runtime_error("token id out of vocabulary during training");
    counts_[ctx.buf][t] += 1.0;
    totals_[ctx.buf] += 1.0;
    ctx.push(t);
  }
}

void NGramModel::add_document(std::span<const TokenId> tokens, const std::string& doc_id) {
  add_sequence(tokens);
  trained_on_.insert(doc_id);
}

double NGramModel::context_total(const std::vector<TokenId>& context) const {
  auto it = totals_.find(context);
  return it == totals_.end() ? 0.0 : it->second;
}

void NGramModel::set_count(const std::vector<TokenId>& context, TokenId token, double count) {
  auto& cell = counts_[context][token];
  totals_[context] += count - cell;
  cell = count;
}

double NGramModel::cond_prob(std::span<const TokenId> context, TokenId token) const {
  if (token >= vocab_size_)
    throw std::runtime_error("token id " + std::to_string(token) + " out of vocabulary");
  const size_t want = static_cast<size_t>(order_ - 1);
  std::vector<TokenId> key(want, kBos);
  const size_t take = std::min(want, context.size());
  for (size_t i = 0; i < take; ++i) {
    key[want - take + i] = context[context.size() - take + i];
  }
  double c = 0.0, total = 0.0;
  auto it = counts_.find(key);
  if (it != counts_.end()) {
    auto jt = it->second.find(token);
    if (jt != it->second.end()) c = jt->second;
    total = context_total(key);
  }
  return (c + alpha_) / (total + alpha_ * static_cast<double>(vocab_size_));
}

double NGramModel::log_prob(std::span<const TokenId> tokens) const {
  const auto seq = effective_tokens(tokens);
  ContextWindow ctx(order_ - 1);
  double lp = 0.0;
  for (TokenId t : seq) {
    lp += std::log(cond_prob(ctx.buf, t));
    ctx.push(t);
  }
  return lp;
}

FitStrengthModel::FitStrengthModel(std::shared_ptr<const NGramModel> target,
                                   std::shared_ptr<const NGramModel> reference, double lambda)
    : target_(std::move(target)), reference_(std::move(reference)), lambda_(lambda) {
  if (!target_ || !reference_) throw std::invalid_argument("null model");
  if (target_->vocab_size() != reference_->vocab_size())
    throw std::invalid_argument("target and reference vocabularies differ");
  if (target_->eos_enabled() != reference_->eos_enabled())
    throw std::invalid_argument("target and reference disagree on EOS handling");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must be in [0,1]");
}

double FitStrengthModel::log_prob(std::span<const TokenId> tokens) const {
  const auto seq = target_->effective_tokens(tokens);
  ContextWindow tgt_ctx(target_->order() - 1);
  ContextWindow ref_ctx(reference_->order() - 1);
  double lp = 0.0;
  for (TokenId t : seq) {
    const double pt = target_->cond_prob(tgt_ctx.buf, t);
    const double pr = reference_->cond_prob(ref_ctx.buf, t);
    lp += std::log(lambda_ * pt + (1.0 - lambda_) * pr);
    tgt_ctx.push(t);
    ref_ctx.push(t);
  }
  return lp;
}

// --- training ------------------------------------------------------------------

NGramModel train_ngram(const Corpus& corpus, const SplitPlan& split, int order, double alpha,
                       bool eos_enabled) {
  const auto docs = fine_tune_docs(corpus, split);
  if (docs.empty()) throw std::runtime_error("fine-tune set is empty");
  NGramModel model(order, alpha, corpus.vocab.size(), eos_enabled);
  for (const Document* doc : docs) model.add_document(doc->tokens, doc->doc_id);
  return model;
}

NGramModel train_ngram_on_docs(const std::vector<const Document*>& docs, int order, double alpha,
                               uint32_t vocab_size, bool eos_enabled) {
  if (docs.empty()) throw std::runtime_error("training document set is empty");
  NGramModel model(order, alpha, vocab_size, eos_enabled);
  for (const Document* doc : docs) model.add_document(doc->tokens, doc->doc_id);
  return model;
}

void DpTrainConfig::validate() const {
  if (!(clip > 0.0)) throw std::invalid_argument("clip must be > 0");
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
}

double dp_epsilon(double clip, double sigma, double delta) {
  if (sigma <= 0.0 || std::isinf(clip)) return std::numeric_limits<double>::infinity();
  const double rho = 0.5 * (clip / sigma) * (clip / sigma);
  return rho + 2.0 * std::sqrt(rho * std::log(1.0 / delta));
}

double dp_sigma_for_epsilon(double epsilon, double clip, double delta) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  const double big_l = std::log(1.0 / delta);
  const double sqrt_rho = -std::sqrt(big_l) + std::sqrt(big_l + epsilon);
  const double rho = sqrt_rho * sqrt_rho;
  return clip / std::sqrt(2.0 * rho);
}

DpTrainResult train_dp_ngram(const Corpus& corpus, const SplitPlan& split, int order, double alpha,
                             const DpTrainConfig& cfg, uint64_t seed) {
  cfg.validate();
  const auto docs = fine_tune_docs(corpus, split);
  if (docs.empty()) throw std::runtime_error("fine-tune set is empty");

  NGramModel aggregate(order, alpha, corpus.vocab.size(), true);
  NGramModel::CountsMap sums;
  std::set<std::string> doc_ids;
  for (const Document* doc : docs) {
    NGramModel one(order, alpha, corpus.vocab.size(), true);
    one.add_sequence(doc->tokens);
    double sq = 0.0;
    for (const auto& [ctx, by_token] : one.counts()) {
      for (const auto& [tok, c] : by_token) sq += c * c;
    }
    const double norm = std::sqrt(sq);
    const double scale = (std::isinf(cfg.clip) || norm <= cfg.clip) ? 1.0 : cfg.clip / norm;
    for (const auto& [ctx, by_token] : one.counts()) {
      for (const auto& [tok, c] : by_token) sums[ctx][tok] += c * scale;
    }
    doc_ids.insert(doc->doc_id);
  }

  Rng rng(derive_seed(seed, "dp-noise"));
  for (auto& [ctx, by_token] : sums) {
    for (auto& [tok, c] : by_token) {
      if (cfg.sigma > 0.0) c = std::max(0.0, c + cfg.sigma * rng.normal());
      if (c > 0.0) aggregate.set_count(ctx, tok, c);
    }
  }
  for (const auto& id : doc_ids) aggregate.record_trained_on(id);

  DpTrainResult result{std::move(aggregate), dp_epsilon(cfg.clip, cfg.sigma, cfg.delta), {}};
  if (cfg.sigma == 0.0) {
    result.warning = "sigma = 0: no noise added, epsilon = inf";
  } else if (cfg.delta >= 1.0 / static_cast<double>(docs.size())) {
    result.warning = "delta >= 1/#examples; a smaller delta is recommended";
  }
  return result;
}

// --- evaluation ------------------------------------------------------------------

double mean_nll_per_token(const ScoringModel& model, const std::vector<const Document*>& docs) {
  if (docs.empty()) throw std::invalid_argument("mean_nll_per_token: no documents");
  const auto* ngram = dynamic_cast<const NGramModel*>(&model);
  const auto* fit = dynamic_cast<const FitStrengthModel*>(&model);
  double lp = 0.0;
  size_t tokens = 0;
  for (const Document* doc : docs) {
    lp += model.log_prob(doc->tokens);
    if (ngram) {
      tokens += ngram->effective_tokens(doc->tokens).size();
    } else if (fit) {
      tokens += fit->target().effective_tokens(doc->tokens).size();
    } else {
      tokens += doc->tokens.size();
    }
  }
  if (tokens == 0) throw std::runtime_error("mean_nll_per_token: zero tokens");
  return -lp / static_cast<double>(tokens);
}

// --- serialization ----------------------------------------------------------------

namespace {

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  put_u64(out, bits);
}

uint64_t get_u64(const std::string& in, size_t& pos) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(in[pos++])) << (8 * i);
  return v;
}

double get_f64(const std::string& in, size_t& pos) {
  const uint64_t bits = get_u64(in, pos);
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

uint64_t hash_id_set(const std::set<std::string>& ids) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& id : ids) h = splitmix64(h ^ fnv1a64(id));
  return h;
}

}  // namespace

void save_model(const NGramModel& model, const std::filesystem::path& dir,
                const DpTrainConfig* dp, double epsilon) {
  std::filesystem::create_directories(dir);

  std::string bin;
  size_t records = 0;
  for (const auto& [ctx, by_token] : model.counts()) {
    for (const auto& [tok, c] : by_token) {
      for (TokenId id : ctx) put_u64(bin, id);
      put_u64(bin, tok);
      put_f64(bin, c);
      ++records;
    }
  }
  write_file(dir / "counts.bin", bin);

  JsonWriter w;
  w.begin_object();
  w.kv("order", static_cast<int64_t>(model.order()));
  w.kv("alpha", model.alpha());
  w.kv("vocab_size", static_cast<uint64_t>(model.vocab_size()));
  w.kv("eos_enabled", model.eos_enabled());
  w.kv("record_count", records);
  w.kv("trained_on_hash", hash_id_set(model.trained_on()));
  w.kv("trained_on_count", model.trained_on().size());
  if (dp != nullptr) {
    w.key("dp").begin_object();
    w.kv("clip", dp->clip).kv("sigma", dp->sigma).kv("delta", dp->delta).kv("epsilon", epsilon);
    w.end_object();
  }
  w.end_object();
  write_file(dir / "meta.json", w.str() + "\n");
}

NGramModel load_model(const std::filesystem::path& dir) {
  nlohmann::json meta = nlohmann::json::parse(read_file(dir / "meta.json"));
  const int order = meta.at("order").get<int>();
  NGramModel model(order, meta.at("alpha").get<double>(), meta.at("vocab_size").get<uint32_t>(),
                   meta.at("eos_enabled").get<bool>());

  const std::string bin = read_file(dir / "counts.bin");
  const size_t fields = static_cast<size_t>(order - 1) + 2;
  if (bin.size() % (fields * 8) != 0)
    throw std::runtime_error("counts.bin size inconsistent with order");
  size_t pos = 0;
  while (pos < bin.size()) {
    std::vector<TokenId> ctx(static_cast<size_t>(order - 1));
    for (auto& id : ctx) id = static_cast<TokenId>(get_u64(bin, pos));
    const TokenId tok = static_cast<TokenId>(get_u64(bin, pos));
    const double c = get_f64(bin, pos);
    model.set_count(ctx, tok, c);
  }
  const size_t expect = meta.at("record_count").get<size_t>();
  size_t records = 0;
  for (const auto& [_, by_token] : model.counts()) records += by_token.size();
  if (records != expect) throw std::runtime_error("counts.bin record count mismatch");
  return model;
}

}  // namespace uinfer
