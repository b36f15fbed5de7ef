#include "uinfer/theory.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace uinfer {

namespace {

void check_same_support_size(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size() || p.empty())
    throw std::invalid_argument("distributions must be non-empty and of equal size");
}

}  // namespace

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  check_same_support_size(p, q);
  double kl = 0.0;
  for (size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    if (q[x] == 0.0) return std::numeric_limits<double>::infinity();
    kl += p[x] * std::log(p[x] / q[x]);
  }
  return kl;
}

double chi2_divergence(std::span<const double> p, std::span<const double> q) {
  check_same_support_size(p, q);
  double sum = 0.0;
  for (size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    if (q[x] == 0.0) return std::numeric_limits<double>::infinity();
    sum += p[x] * p[x] / q[x];
  }
  return sum - 1.0;
}

double exact_mean_statistic(const DiscreteMixture& mix, size_t u) {
  mix.validate();
  const auto task = mix.task_marginal();
  const auto rest = mix.leave_one_out(u);  // throws for alpha_u = 1
  const auto& du = mix.components[u];
  double t = 0.0;
  for (uint32_t x = 0; x < mix.alphabet_size; ++x) {
    if (du[x] == 0.0) continue;
    if (rest[x] == 0.0) return std::numeric_limits<double>::infinity();
    t += du[x] * std::log(task[x] / rest[x]);
  }
  return t;
}

Prop1Report verify_prop1(const DiscreteMixture& mix, size_t u) {
  Prop1Report report;
  report.user = u;
  const auto rest = mix.leave_one_out(u);
  const auto& du = mix.components[u];
  report.lower = std::log(mix.weights[u]) + kl_divergence(du, rest);
  report.value = exact_mean_statistic(mix, u);
  report.upper = mix.weights[u] * chi2_divergence(du, rest);
  report.vacuous =
      std::isinf(report.lower) || std::isinf(report.value) || std::isinf(report.upper);
  report.holds = report.lower < report.value && report.value <= report.upper + 1e-9;
  return report;
}

Prop2Report verify_prop2(std::span<const double> p, std::span<const double> q, double lam,
                         double mu) {
  check_same_support_size(p, q);
  if (!(lam >= 0.0 && lam <= 1.0 && mu >= 0.0 && mu <= 1.0))
    throw std::invalid_argument("lam and mu must be in [0,1]");
  std::vector<double> p2(p.size()), q2(q.size());
  for (size_t x = 0; x < p.size(); ++x) {
    p2[x] = lam * p[x] + (1.0 - lam) * q[x];
    q2[x] = mu * q[x] + (1.0 - mu) * p[x];
  }
  Prop2Report report;
  report.kl_before = kl_divergence(p, q);
  report.kl_after = kl_divergence(p2, q2);
  report.holds = report.kl_after <= report.kl_before + 1e-12;
  return report;
}

std::pair<double, double> draw_mixing_coefficients(Rng& rng, size_t index) {
  switch (index % 5) {
    case 0: return {0.0, 1.0};
    case 1: return {1.0, rng.uniform()};
    case 2: return {rng.uniform(), 1.0};
    case 3: return {1.0, 1.0};
    default: {
      const double lam = rng.uniform();
      const double mu = (1.0 - lam) + lam * rng.uniform();  // U[1-lam, 1]
      return {lam, mu};
    }
  }
}

}  // namespace uinfer
