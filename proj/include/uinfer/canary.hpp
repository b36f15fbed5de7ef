#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "uinfer/corpus.hpp"

namespace uinfer {

struct CanarySpec {
  std::vector<size_t> lengths;  // shared-substring token lengths
  size_t per_length = 1;
  uint64_t seed = 0;

  size_t total() const { return lengths.size() * per_length; }
  void validate() const;
};

struct CanaryUser {
  std::string base_user_id;
  std::string canary_user_id;
  size_t length = 0;
  std::vector<TokenId> substring;
};

struct CanaryResult {
  Corpus corpus;                    // base users replaced by their canary versions
  std::vector<CanaryUser> registry;
};

// Worst-case user construction: for each canary, a real user is drawn
// without replacement, a contiguous substring is sampled from one of its
// documents, and that substring is spliced into every document of the
// user at a random token boundary. The trailing EOS never participates:
// substrings are sampled from and inserted into the word region.
CanaryResult make_canaries(const Corpus& corpus, const CanarySpec& spec);

// Subsamples each canary user's fine-tune contribution down to
// docs_per_canary documents; attacker and validation reservations are
// untouched.
Corpus canary_data_limit(const Corpus& corpus, const SplitPlan& split,
                         const std::vector<CanaryUser>& registry, size_t docs_per_canary,
                         uint64_t seed);

void save_canary_registry(const std::vector<CanaryUser>& registry,
                          const std::filesystem::path& file);
std::vector<CanaryUser> load_canary_registry(const std::filesystem::path& file);

}  // namespace uinfer
