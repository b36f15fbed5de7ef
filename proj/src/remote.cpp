#include "uinfer/remote.hpp"

#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "uinfer/io.hpp"

namespace uinfer {

RemoteScoringModel::RemoteScoringModel(std::string host, int port, uint32_t vocab_size,
                                       int timeout_sec, int retries)
    : host_(std::move(host)),
      port_(port),
      vocab_size_(vocab_size),
      timeout_sec_(timeout_sec),
      retries_(retries) {
  if (vocab_size_ == 0) throw std::invalid_argument("vocab_size must be positive");
  if (timeout_sec_ < 1) throw std::invalid_argument("timeout must be >= 1s");
  if (retries_ < 0) throw std::invalid_argument("retries must be >= 0");
}

std::vector<double> RemoteScoringModel::log_prob_batch(
    const std::vector<std::vector<TokenId>>& sequences) const {
  for (const auto& seq : sequences) {
    for (TokenId t : seq) {
      if (t >= vocab_size_) throw std::runtime_error("token id out of vocabulary");
    }
  }
  JsonWriter w;
  w.begin_object().key("tokens").begin_array();
  for (const auto& seq : sequences) {
    w.begin_array();
    for (TokenId t : seq) w.value(static_cast<uint64_t>(t));
    w.end_array();
  }
  w.end_array().end_object();

  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= retries_; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(100 * attempt));
    httplib::Client client(host_, port_);
    client.set_connection_timeout(timeout_sec_);
    client.set_read_timeout(timeout_sec_);
    auto res = client.Post("/v1/logprob", w.str(), "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "provider returned HTTP " + std::to_string(res->status);
      continue;
    }
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      last_error = std::string("bad provider response: ") + e.what();
      continue;
    }
    if (!body.contains("logprobs") || !body["logprobs"].is_array() ||
        body["logprobs"].size() != sequences.size()) {
      last_error = "provider response missing a logprob per sequence";
      continue;
    }
    std::vector<double> out;
    out.reserve(sequences.size());
    for (const auto& v : body["logprobs"]) out.push_back(v.get<double>());
    return out;
  }
  throw std::runtime_error("remote provider " + host_ + ":" + std::to_string(port_) +
                           " failed after " + std::to_string(retries_ + 1) +
                           " attempts: " + last_error);
}

double RemoteScoringModel::log_prob(std::span<const TokenId> tokens) const {
  return log_prob_batch({std::vector<TokenId>(tokens.begin(), tokens.end())})[0];
}

}  // namespace uinfer
