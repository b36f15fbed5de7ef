#pragma once

#include <span>
#include <vector>

#include "uinfer/mixture.hpp"

namespace uinfer {

// KL(P||Q) = sum_x P(x) log(P(x)/Q(x)) in nats; 0*log 0 = 0, and mass on a
// Q-null symbol makes the divergence +inf.
double kl_divergence(std::span<const double> p, std::span<const double> q);

// chi^2(P||Q) = sum_x P(x)^2 / Q(x) - 1, same support convention.
double chi2_divergence(std::span<const double> p, std::span<const double> q);

// Population mean of the attack statistic when the target equals the task
// mixture and the reference is the leave-one-out mixture:
//   sum_x D_u(x) log(D_task(x) / D_-u(x)),
// over single-symbol documents.
double exact_mean_statistic(const DiscreteMixture& mix, size_t u);

struct Prop1Report {
  size_t user = 0;
  double lower = 0.0;   // log(alpha_u) + KL(D_u || D_-u)
  double value = 0.0;   // mean statistic
  double upper = 0.0;   // alpha_u * chi^2(D_u || D_-u)
  bool holds = false;   // lower < value <= upper + 1e-9
  bool vacuous = false; // some side is infinite; bounds carry no information
};

Prop1Report verify_prop1(const DiscreteMixture& mix, size_t u);

struct Prop2Report {
  double kl_before = 0.0;  // KL(P||Q)
  double kl_after = 0.0;   // KL(lam*P+(1-lam)*Q || mu*Q+(1-mu)*P)
  bool holds = false;      // kl_after <= kl_before + 1e-12
};

Prop2Report verify_prop2(std::span<const double> p, std::span<const double> q, double lam,
                         double mu);

// (lam, mu) draw for randomized Prop-2 batches: rotates through the
// boundary corners and the interior of lam + mu >= 1, the mislabeling
// regime where the mixing inequality is provable (outside it, KL's
// asymmetry admits counterexamples).
std::pair<double, double> draw_mixing_coefficients(Rng& rng, size_t index);

}  // namespace uinfer
