#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uinfer/rng.hpp"

namespace uinfer {

// Finite-alphabet user mixture for exact theory checks: n users with
// weights alpha summing to one, each a categorical over single symbols;
// documents are i.i.d. symbol strings of a fixed length.
struct DiscreteMixture {
  uint32_t alphabet_size = 0;
  std::vector<double> weights;                   // all > 0, sum 1 within 1e-12
  std::vector<std::vector<double>> components;   // one categorical per user

  size_t n_users() const { return weights.size(); }
  void validate() const;

  // Sum_u alpha_u * D_u.
  std::vector<double> task_marginal() const;

  // Mixture with user u removed and reweighted by 1/(1 - alpha_u).
  std::vector<double> leave_one_out(size_t u) const;
};

// Log-probability of an i.i.d. symbol document under one categorical.
double doc_log_prob(std::span<const double> dist, std::span<const uint32_t> doc);

// Random nondegenerate instance: weights and components ~ Dirichlet(1).
DiscreteMixture random_mixture(Rng& rng, uint32_t min_alphabet, uint32_t max_alphabet,
                               size_t min_users, size_t max_users);

}  // namespace uinfer
