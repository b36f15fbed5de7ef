#include "uinfer/mixture.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace uinfer {

void DiscreteMixture::validate() const {
  if (alphabet_size == 0) throw std::invalid_argument("alphabet_size must be positive");
  if (weights.empty()) throw std::invalid_argument("mixture has no users");
  if (components.size() != weights.size())
    throw std::invalid_argument("weights/components size mismatch");
  double total = 0.0;
  for (double a : weights) {
    if (!(a > 0.0)) throw std::invalid_argument("all mixture weights must be > 0");
    total += a;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("mixture weights must sum to 1 within 1e-12");
  for (const auto& comp : components) {
    if (comp.size() != alphabet_size)
      throw std::invalid_argument("component size differs from alphabet_size");
    double s = 0.0;
    for (double p : comp) {
      if (p < 0.0) throw std::invalid_argument("component has negative mass");
      s += p;
    }
    if (std::abs(s - 1.0) > 1e-12)
      throw std::invalid_argument("every component must sum to 1 within 1e-12");
  }
}

std::vector<double> DiscreteMixture::task_marginal() const {
  std::vector<double> out(alphabet_size, 0.0);
  for (size_t u = 0; u < n_users(); ++u) {
    for (uint32_t x = 0; x < alphabet_size; ++x) out[x] += weights[u] * components[u][x];
  }
  return out;
}

std::vector<double> DiscreteMixture::leave_one_out(size_t u) const {
  if (n_users() < 2) throw std::invalid_argument("leave-one-out needs at least 2 users");
  if (u >= n_users()) throw std::out_of_range("user index out of range");
  const double rest = 1.0 - weights[u];
  if (!(rest > 0.0)) throw std::runtime_error("alpha_u = 1: leave-one-out mixture undefined");
  std::vector<double> out(alphabet_size, 0.0);
  for (size_t v = 0; v < n_users(); ++v) {
    if (v == u) continue;
    for (uint32_t x = 0; x < alphabet_size; ++x) out[x] += weights[v] * components[v][x];
  }
  for (double& p : out) p /= rest;
  return out;
}

double doc_log_prob(std::span<const double> dist, std::span<const uint32_t> doc) {
  double lp = 0.0;
  for (uint32_t sym : doc) {
    if (sym >= dist.size()) throw std::out_of_range("symbol outside alphabet");
    lp += std::log(dist[sym]);
  }
  return lp;
}

DiscreteMixture random_mixture(Rng& rng, uint32_t min_alphabet, uint32_t max_alphabet,
                               size_t min_users, size_t max_users) {
  if (min_alphabet < 1 || min_alphabet > max_alphabet || min_users < 2 ||
      min_users > max_users)
    throw std::invalid_argument("bad random_mixture ranges");
  DiscreteMixture mix;
  mix.alphabet_size = min_alphabet + static_cast<uint32_t>(rng.index(max_alphabet - min_alphabet + 1));
  const size_t n = min_users + rng.index(max_users - min_users + 1);
  const std::vector<double> ones_users(n, 1.0);
  const std::vector<double> ones_alpha(mix.alphabet_size, 1.0);
  mix.weights = rng.dirichlet(ones_users);
  mix.components.reserve(n);
  for (size_t u = 0; u < n; ++u) mix.components.push_back(rng.dirichlet(ones_alpha));
  return mix;
}

}  // namespace uinfer
