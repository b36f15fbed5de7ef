#pragma once

#include <string>
#include <vector>

#include "uinfer/ngram.hpp"

namespace uinfer {

// Client for an external likelihood provider:
//   POST /v1/logprob  {"tokens": [[int,...],...]}  ->  {"logprobs": [float,...]}
// one value per sequence, nats. Lets the attack run against any model
// that can serve sequence log-likelihoods over this vocabulary.
class RemoteScoringModel : public ScoringModel {
 public:
  RemoteScoringModel(std::string host, int port, uint32_t vocab_size, int timeout_sec = 10,
                     int retries = 2);

  double log_prob(std::span<const TokenId> tokens) const override;
  std::vector<double> log_prob_batch(const std::vector<std::vector<TokenId>>& sequences) const;
  uint32_t vocab_size() const override { return vocab_size_; }

 private:
  std::string host_;
  int port_;
  uint32_t vocab_size_;
  int timeout_sec_;
  int retries_;
};

}  // namespace uinfer
