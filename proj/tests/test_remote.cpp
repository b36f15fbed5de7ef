#include <doctest.h>

#include <atomic>
#include <memory>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "uinfer/attack.hpp"
#include "uinfer/remote.hpp"

using namespace uinfer;

namespace {

// Provider stub: serves sequence log-likelihoods for a local unigram model
// over the wire contract.
class ProviderFixture {
 public:
  explicit ProviderFixture(std::shared_ptr<NGramModel> model) : model_(std::move(model)) {
    server_.Post("/v1/logprob", [this](const httplib::Request& req, httplib::Response& res) {
      nlohmann::json body = nlohmann::json::parse(req.body);
      nlohmann::json out;
      out["logprobs"] = nlohmann::json::array();
      for (const auto& seq : body.at("tokens")) {
        std::vector<TokenId> tokens;
        for (const auto& t : seq) tokens.push_back(t.get<TokenId>());
        out["logprobs"].push_back(model_->log_prob(tokens));
      }
      res.set_content(out.dump(), "application/json");
    });
    server_.Post("/v1/bad", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("{\"nope\": true}", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~ProviderFixture() {
    server_.stop();
    thread_.join();
  }

  int port() const { return port_; }

 private:
  std::shared_ptr<NGramModel> model_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

std::shared_ptr<NGramModel> toy_model() {
  auto m = std::make_shared<NGramModel>(1, 0.1, 6, false);
  m->set_count({}, 2, 5.0);
  m->set_count({}, 3, 2.0);
  m->set_count({}, 4, 1.0);
  return m;
}

}  // namespace

TEST_CASE("remote provider returns the provider's log-likelihoods") {
  auto model = toy_model();
  ProviderFixture provider(model);
  RemoteScoringModel remote("127.0.0.1", provider.port(), model->vocab_size(), 5, 0);

  const std::vector<TokenId> doc{2, 3, 2, 4};
  CHECK(remote.log_prob(doc) == model->log_prob(doc));

  const std::vector<std::vector<TokenId>> batch{{2}, {3, 4}, {2, 2, 2}};
  const auto values = remote.log_prob_batch(batch);
  REQUIRE(values.size() == 3);
  for (size_t i = 0; i < batch.size(); ++i) {
    CHECK(values[i] == model->log_prob(batch[i]));
  }
}

TEST_CASE("remote provider plugs into the attack as a scoring model") {
  auto target = toy_model();
  ProviderFixture provider(target);
  RemoteScoringModel remote("127.0.0.1", provider.port(), target->vocab_size(), 5, 1);

  auto ref = std::make_shared<NGramModel>(1, 0.1, 6, false);
  ref->set_count({}, 2, 1.0);
  ref->set_count({}, 3, 1.0);

  Document doc;
  doc.doc_id = "d";
  doc.user_id = "u";
  doc.tokens = {2, 2, 3};
  CHECK(doc_score(doc, remote, *ref) ==
        doctest::Approx(target->log_prob(doc.tokens) - ref->log_prob(doc.tokens))
            .epsilon(1e-12));
}

TEST_CASE("remote provider rejects out-of-vocab ids locally") {
  RemoteScoringModel remote("127.0.0.1", 1, 6, 1, 0);
  CHECK_THROWS_WITH_AS(remote.log_prob(std::vector<TokenId>{99}),
                       doctest::Contains("out of vocabulary"), std::runtime_error);
}

TEST_CASE("connection failure surfaces after the configured retries") {
  // nothing listens on this port
  RemoteScoringModel remote("127.0.0.1", 1, 6, 1, 1);
  CHECK_THROWS_WITH_AS(remote.log_prob(std::vector<TokenId>{2}),
                       doctest::Contains("failed after 2 attempts"), std::runtime_error);
}

TEST_CASE("malformed provider response is an error") {
  auto model = toy_model();
  ProviderFixture provider(model);
  httplib::Client probe("127.0.0.1", provider.port());
  // misbehaving endpoint: missing logprobs field
  auto res = probe.Post("/v1/bad", "{\"tokens\": [[2]]}", "application/json");
  REQUIRE(res);

  // point the client at a path that returns the wrong shape by spoofing a
  // server with only /v1/bad -> use a fresh server exposing /v1/logprob
  // with the wrong payload instead
  httplib::Server bad;
  bad.Post("/v1/logprob", [](const httplib::Request&, httplib::Response& res2) {
    res2.set_content("{\"logprobs\": []}", "application/json");  // wrong count
  });
  const int port = bad.bind_to_any_port("127.0.0.1");
  std::thread t([&bad] { bad.listen_after_bind(); });
  bad.wait_until_ready();
  RemoteScoringModel remote("127.0.0.1", port, 6, 1, 0);
  CHECK_THROWS_WITH_AS(remote.log_prob(std::vector<TokenId>{2}),
                       doctest::Contains("missing a logprob per sequence"), std::runtime_error);
  bad.stop();
  t.join();
}
