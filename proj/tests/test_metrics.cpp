#include <doctest.h>

#include <cmath>

#include "uinfer/metrics.hpp"
#include "uinfer/rng.hpp"

using namespace uinfer;

namespace {

// Independent oracle: literal pairwise count with half credit for ties.
double brute_force_auroc(const std::vector<double>& in, const std::vector<double>& out) {
  double wins = 0.0;
  for (double a : in) {
    for (double b : out) {
      if (a > b) {
        wins += 1.0;
      } else if (a == b) {
        wins += 0.5;
      }
    }
  }
  return wins / (static_cast<double>(in.size()) * static_cast<double>(out.size()));
}

// Scores on a coarse grid so sums and shifts stay exact in floating point.
std::vector<double> grid_scores(Rng& rng, size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(rng.index(2048)) / 1024.0 - 1.0;
  return v;
}

}  // namespace

TEST_CASE("auroc on known instances") {
  CHECK(auroc(std::vector<double>{2, 3}, std::vector<double>{0, 1}) == 1.0);
  CHECK(auroc(std::vector<double>{1}, std::vector<double>{1}) == 0.5);
  CHECK(auroc(std::vector<double>{1, 3}, std::vector<double>{2}) == 0.5);
}

TEST_CASE("auroc equals the brute-force pairwise count on random inputs") {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t n_in = 1 + rng.index(50);
    const size_t n_out = 1 + rng.index(50);
    auto in = grid_scores(rng, n_in);
    auto out = grid_scores(rng, n_out);
    CHECK(auroc(in, out) == brute_force_auroc(in, out));  // exact equality
  }
}

TEST_CASE("auroc complement and monotone-transform invariance") {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    auto in = grid_scores(rng, 1 + rng.index(30));
    auto out = grid_scores(rng, 1 + rng.index(30));
    const double a = auroc(in, out);
    CHECK(a + auroc(out, in) == 1.0);

    // strictly increasing transform: 2x + 3 (exact on the grid)
    auto tin = in;
    auto tout = out;
    for (auto& v : tin) v = 2.0 * v + 3.0;
    for (auto& v : tout) v = 2.0 * v + 3.0;
    CHECK(auroc(tin, tout) == a);

    // constant shift leaves it unchanged (argmax-level scale property)
    auto sin_ = in;
    auto sout = out;
    for (auto& v : sin_) v += 2.5;
    for (auto& v : sout) v += 2.5;
    CHECK(auroc(sin_, sout) == a);
  }
}

TEST_CASE("roc curve shape on known instances") {
  // perfect separation passes through (0,1)
  auto perfect = roc_curve(std::vector<double>{2, 3}, std::vector<double>{0, 1});
  bool passes = false;
  for (size_t i = 0; i < perfect.size(); ++i) {
    if (perfect.fpr[i] == 0.0 && perfect.tpr[i] == 1.0) passes = true;
  }
  CHECK(passes);

  // identical multisets stay on the diagonal
  auto diag = roc_curve(std::vector<double>{1, 2}, std::vector<double>{1, 2});
  for (size_t i = 0; i < diag.size(); ++i) CHECK(diag.fpr[i] == diag.tpr[i]);

  // hand-enumerated thresholds: in=[3,1], out=[2,0] contains (0, 0.5)
  auto curve = roc_curve(std::vector<double>{3, 1}, std::vector<double>{2, 0});
  bool found = false;
  for (size_t i = 0; i < curve.size(); ++i) {
    if (curve.fpr[i] == 0.0 && curve.tpr[i] == 0.5) found = true;
  }
  CHECK(found);
}

TEST_CASE("roc curves start at (0,0), end at (1,1), and are monotone") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto in = grid_scores(rng, 1 + rng.index(40));
    auto out = grid_scores(rng, 1 + rng.index(40));
    auto curve = roc_curve(in, out);
    REQUIRE(curve.size() >= 2);
    CHECK(curve.fpr.front() == 0.0);
    CHECK(curve.tpr.front() == 0.0);
    CHECK(curve.fpr.back() == 1.0);
    CHECK(curve.tpr.back() == 1.0);
    for (size_t i = 1; i < curve.size(); ++i) {
      CHECK(curve.fpr[i] >= curve.fpr[i - 1]);
      CHECK(curve.tpr[i] >= curve.tpr[i - 1]);
      CHECK(curve.thresholds[i] < curve.thresholds[i - 1]);
    }
  }
  CHECK_THROWS_AS(roc_curve({}, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("tpr_at_fpr reads the step curve") {
  // curve {(0,0),(0,.5),(.5,.5),(.5,1),(1,1)} from in=[3,1], out=[2,0]
  auto curve = roc_curve(std::vector<double>{3, 1}, std::vector<double>{2, 0});
  CHECK(tpr_at_fpr(curve, 0.01) == 0.5);
  CHECK(tpr_at_fpr(curve, 0.5) == 1.0);
  CHECK(tpr_at_fpr(curve, 1.0) == 1.0);
  CHECK(tpr_at_fpr(curve, 0.0) == 0.5);

  auto perfect = roc_curve(std::vector<double>{2, 3}, std::vector<double>{0, 1});
  for (double t : {0.0, 0.001, 0.37, 1.0}) CHECK(tpr_at_fpr(perfect, t) == 1.0);

  // diagonal: about fpr_target within one out-step
  std::vector<double> many_in, many_out;
  for (int i = 0; i < 100; ++i) {
    many_in.push_back(i);
    many_out.push_back(i);
  }
  auto diag = roc_curve(many_in, many_out);
  for (double t : {0.1, 0.25, 0.6}) {
    CHECK(std::abs(tpr_at_fpr(diag, t) - t) <= 1.0 / 100.0 + 1e-12);
  }

  // non-decreasing in the target
  double prev = 0.0;
  for (double t = 0.0; t <= 1.0; t += 0.05) {
    const double v = tpr_at_fpr(curve, t);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("bootstrap: perfect separation is degenerate at 1.0") {
  const std::vector<double> in{5, 6, 7};
  const std::vector<double> out{1, 2, 3};
  const auto s = bootstrap_auroc(in, out, 50, 99);
  CHECK(s.mean == 1.0);
  CHECK(s.std_dev == 0.0);
  CHECK(s.ci_lo == 1.0);
  CHECK(s.ci_hi == 1.0);
}

TEST_CASE("bootstrap: B=1 gives a degenerate summary at the single value") {
  const std::vector<double> in{1, 3};
  const std::vector<double> out{2};
  const auto s = bootstrap_auroc(in, out, 1, 5);
  CHECK(s.B == 1);
  CHECK(s.degenerate);
  CHECK(s.std_dev == 0.0);
  CHECK(s.ci_lo == s.mean);
  CHECK(s.ci_hi == s.mean);
}

TEST_CASE("bootstrap is deterministic per seed and independent of jobs") {
  Rng rng(4);
  auto in = grid_scores(rng, 25);
  auto out = grid_scores(rng, 30);
  const auto a = bootstrap_auroc(in, out, 64, 7, 1);
  const auto b = bootstrap_auroc(in, out, 64, 7, 1);
  const auto c = bootstrap_auroc(in, out, 64, 7, 4);
  CHECK(a.mean == b.mean);
  CHECK(a.std_dev == b.std_dev);
  CHECK(a.mean == c.mean);
  CHECK(a.std_dev == c.std_dev);
  CHECK(a.ci_lo == c.ci_lo);
  CHECK(a.ci_hi == c.ci_hi);
}

TEST_CASE("bootstrap mean converges to the point estimate") {
  Rng rng(5);
  auto in = grid_scores(rng, 40);
  auto out = grid_scores(rng, 40);
  const double point = auroc(in, out);
  const auto s = bootstrap_auroc(in, out, 10000, 1);
  const double stderr_ = s.std_dev / std::sqrt(10000.0);
  CHECK(std::abs(s.mean - point) <= 3.0 * std::max(stderr_, 1e-6) + 0.01);
  CHECK(s.ci_lo <= s.mean);
  CHECK(s.mean <= s.ci_hi);
}

TEST_CASE("spearman oracles") {
  CHECK(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{10, 20, 25, 90}) == 1.0);
  CHECK(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{8, 5, 3, 2}) == -1.0);
  // 1 - 6*sum(d^2)/(n(n^2-1)) with d = (-1,1,0)
  CHECK(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{2, 1, 3}) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}),
                       doctest::Contains("undefined correlation"), std::runtime_error);
  CHECK_THROWS_AS(spearman(std::vector<double>{1}, std::vector<double>{2}),
                  std::invalid_argument);
}

TEST_CASE("spearman matches the no-ties closed form on random permutations") {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const size_t n = 3 + rng.index(20);
    std::vector<double> xs(n), ys(n);
    std::vector<size_t> perm(n);
    for (size_t i = 0; i < n; ++i) {
      xs[i] = static_cast<double>(i);
      perm[i] = i;
    }
    rng.shuffle(perm);
    for (size_t i = 0; i < n; ++i) ys[i] = static_cast<double>(perm[i]);
    double d2 = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double d = static_cast<double>(i) - ys[i];
      d2 += d * d;
    }
    const double nn = static_cast<double>(n);
    const double closed = 1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0));
    CHECK(spearman(xs, ys) == doctest::Approx(closed).epsilon(1e-12));
  }
}

TEST_CASE("average ranks handle ties") {
  // xs has a tie; ranks (1.5, 1.5, 3) vs ys ranks (1, 2, 3)
  const std::vector<double> xs{5, 5, 9};
  const std::vector<double> ys{1, 2, 3};
  // Pearson of (1.5,1.5,3) and (1,2,3) = (3-2)*... compute directly
  const double r = spearman(xs, ys);
  CHECK(r == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
}
