#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace uinfer::presets {

// Constants carried over from the source experiments, kept in one place so
// they are auditable and testable. Preset names appear in the CLI help.

// FPR grid of the TPR-at-low-FPR table.
inline const std::vector<double> kTable7FprGrid{0.001, 0.005, 0.01, 0.05, 0.1};

// Attacker-knowledge grid endpoints.
inline const std::vector<size_t> kKnowledgeGrid{1, 5, 10, 50};

// Per-user fine-tuning data caps.
inline const std::vector<size_t> kCapGrid{5, 25, 50, 100};

// 180 canaries spanning substring lengths 1-100: 9 lengths x 20 each.
inline const std::vector<size_t> kCanary180Lengths{1, 2, 5, 10, 20, 30, 50, 75, 100};
inline constexpr size_t kCanary180PerLength = 20;

inline constexpr double kDpDelta = 1e-6;

// Minimum documents per user for the four source datasets.
inline int min_docs_for(const std::string& dataset) {
  if (dataset == "arxiv") return 20;
  if (dataset == "reddit") return 100;
  if (dataset == "ccnews") return 30;
  if (dataset == "enron") return 150;
  throw std::invalid_argument("unknown dataset preset \"" + dataset +
                              "\" (want arxiv|reddit|ccnews|enron)");
}

}  // namespace uinfer::presets
