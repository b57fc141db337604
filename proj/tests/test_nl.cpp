#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ppr/nl.hpp"
#include "ppr/turtle.hpp"
#include "support/random_graph.hpp"

namespace ppr {
namespace {

using nl::Intent;

AkgGraph demo() {
  std::ifstream in(std::string(PPR_FIXTURE_DIR) + "/demo.ttl");
  std::stringstream ss;
  ss << in.rdbuf();
  return *ttl::load_turtle(ss.str()).graph;
}

TEST(Nl, TokensDropStopWordsAndPunctuation) {
  EXPECT_EQ(nl::tokens("Why did the Battery not arrive in time?"),
            (std::vector<std::string>{"battery", "arrive", "time"}));
  EXPECT_TRUE(nl::tokens("").empty());
  EXPECT_TRUE(nl::tokens("  ?! the of ").empty());
}

TEST(Nl, NodeTokensIncludeLocalNameParts) {
  nl::CatalogEntry e{Iri{"http://example.org/ev#AgvBatteryLow"}, NodeKind::PlausibleCause, "Charge too low"};
  auto t = nl::node_tokens(e);
  for (const char* w : {"agvbatterylow", "agv", "battery", "low", "charge", "too"}) {
    EXPECT_TRUE(std::count(t.begin(), t.end(), w)) << w;
  }
  nl::CatalogEntry acronym{Iri{"urn:x:AGV1_Transport"}, NodeKind::ProvidedCapability, ""};
  auto a = nl::node_tokens(acronym);
  EXPECT_TRUE(std::count(a.begin(), a.end(), "agv1"));
  EXPECT_TRUE(std::count(a.begin(), a.end(), "transport"));
}

TEST(Nl, DeterministicExamples) {
  AkgGraph g = demo();
  auto why = nl::classify_deterministic("Why did the battery not arrive in time", g);
  EXPECT_EQ(why.intent, Intent::Diagnose);
  EXPECT_EQ(why.slots.node, g.expand("ex:BatteryLate"));

  auto sched = nl::classify_deterministic("schedule 2 runs of CellModule", g);
  EXPECT_EQ(sched.intent, Intent::Schedule);
  EXPECT_EQ(sched.slots.node, g.expand("ex:CellModule"));
  EXPECT_EQ(sched.slots.n, 2u);

  auto one = nl::classify_deterministic("Schedule the cell module", g);
  EXPECT_EQ(one.intent, Intent::Schedule);
  EXPECT_EQ(one.slots.n, 1u);

  auto match = nl::classify_deterministic("Which resource can unscrew the housing cover?", g);
  EXPECT_EQ(match.intent, Intent::Match);
  EXPECT_EQ(match.slots.node, g.expand("ex:Unscrew"));

  auto who = nl::classify_deterministic("who can inspect the cell module", g);
  EXPECT_EQ(who.intent, Intent::Match);
  EXPECT_EQ(who.slots.node, g.expand("ex:Inspect"));

  auto look = nl::classify_deterministic("robot 2", g);
  EXPECT_EQ(look.intent, Intent::Lookup);
  EXPECT_EQ(look.slots.node, g.expand("ex:Robot2"));

  EXPECT_EQ(nl::classify_deterministic("hello", AkgGraph{}).intent, Intent::Unknown);
  EXPECT_FALSE(nl::classify_deterministic("hello", AkgGraph{}).slots.node);
  EXPECT_EQ(nl::classify_deterministic("why is the sky blue", g).intent, Intent::Unknown);
}

TEST(Nl, TiesGoToSmallestIri) {
  AkgGraph g;
  g.add_node(Iri{"urn:b:Late"}, NodeKind::UndesiredCondition, "Pallet late");
  g.add_node(Iri{"urn:a:Late"}, NodeKind::UndesiredCondition, "Pallet late");
  auto c = nl::classify_deterministic("why was the pallet late", g);
  EXPECT_EQ(c.slots.node, Iri{"urn:a:Late"});
}

// Whatever the question, a chosen slot has the kind its intent allows and the
// overlap is maximal among allowed nodes.
TEST(Nl, SlotKindAlwaysFitsIntent) {
  std::mt19937_64 rng(31);
  const std::vector<std::string> openers = {"why ", "schedule 4 ", "which resource ", "who can ", ""};
  for (int round = 0; round < 200; ++round) {
    AkgGraph g = testing::random_graph(rng);
    auto catalog = nl::make_catalog(g);
    std::string q = testing::pick(rng, openers);
    for (int k = 0; k < 3 && !catalog.nodes.empty(); ++k) q += testing::pick(rng, catalog.nodes).label + " ";
    q += testing::random_text(rng);
    auto c = nl::classify_deterministic(q, catalog);
    if (c.intent == Intent::Unknown) {
      EXPECT_FALSE(c.slots.node);
      continue;
    }
    ASSERT_TRUE(c.slots.node);
    EXPECT_TRUE(nl::slot_kind_allowed(c.intent, g.node(*c.slots.node).kind));
    auto words = nl::tokens(q);
    std::set<std::string> qs(words.begin(), words.end());
    auto overlap = [&](const nl::CatalogEntry& e) {
      std::size_t n = 0;
      for (const auto& t : nl::node_tokens(e)) n += qs.count(t);
      return n;
    };
    std::size_t chosen = 0;
    for (const auto& e : catalog.nodes) {
      if (e.iri == *c.slots.node) chosen = overlap(e);
    }
    EXPECT_GT(chosen, 0u);
    for (const auto& e : catalog.nodes) {
      if (!nl::slot_kind_allowed(c.intent, e.kind)) continue;
      EXPECT_LE(overlap(e), chosen);
      if (overlap(e) == chosen) EXPECT_GE(e.iri, *c.slots.node);
    }
  }
}

TEST(Nl, InterpretReplyRejectsUnknownNodesAndKinds) {
  auto catalog = nl::make_catalog(demo());
  const std::string late = "http://example.org/ev#BatteryLate";
  auto ok = nl::ChatCompletionBackend::interpret_reply(
      "Sure: {\"intent\": \"diagnose\", \"node\": \"" + late + "\", \"n\": null}", catalog);
  EXPECT_EQ(ok.intent, Intent::Diagnose);
  EXPECT_EQ(ok.slots.node, Iri{late});

  auto sched = nl::ChatCompletionBackend::interpret_reply(
      R"({"intent": "schedule", "node": "http://example.org/ev#CellModule", "n": 3})", catalog);
  EXPECT_EQ(sched.intent, Intent::Schedule);
  EXPECT_EQ(sched.slots.n, 3u);

  for (const char* bad : {
           "no json here",
           R"({"intent": "diagnose", "node": "http://example.org/ev#Nope"})",
           R"({"intent": "diagnose", "node": "http://example.org/ev#AGV1"})",
           R"({"intent": "schedule", "node": "http://example.org/ev#CellModule", "n": 0})",
           R"({"intent": "delete", "node": "http://example.org/ev#AGV1"})",
           R"({"intent": "lookup"})",
       }) {
    auto c = nl::ChatCompletionBackend::interpret_reply(bad, catalog);
    EXPECT_EQ(c.intent, Intent::Unknown) << bad;
    EXPECT_FALSE(c.slots.node) << bad;
  }
}

class FakeCompletions {
 public:
  explicit FakeCompletions(std::string content) {
    server_.Post("/v1/chat/completions", [this, content](const httplib::Request& req, httplib::Response& res) {
      last_auth_ = req.get_header_value("Authorization");
      last_body_ = nlohmann::json::parse(req.body);
      nlohmann::json reply{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}};
      res.set_content(reply.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeCompletions() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

  std::string last_auth_;
  nlohmann::json last_body_;

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

TEST(Nl, ChatCompletionBackendTalksOpenAiStyle) {
  AkgGraph g = demo();
  FakeCompletions fake(R"({"intent":"match","node":"http://example.org/ev#Unscrew","n":null})");
  nl::ChatCompletionBackend backend({fake.url(), "test-model", "secret", std::chrono::seconds(5)});
  auto c = backend.classify("who loosens the screws", nl::make_catalog(g));
  EXPECT_EQ(c.intent, Intent::Match);
  EXPECT_EQ(c.slots.node, g.expand("ex:Unscrew"));
  EXPECT_EQ(c.backend, "chat-completion:test-model");
  EXPECT_EQ(fake.last_auth_, "Bearer secret");
  EXPECT_EQ(fake.last_body_["model"], "test-model");
  EXPECT_EQ(fake.last_body_["temperature"], 0);
  std::string user = fake.last_body_["messages"][1]["content"];
  EXPECT_NE(user.find("who loosens the screws"), std::string::npos);
  EXPECT_NE(user.find("http://example.org/ev#Unscrew"), std::string::npos);
}

// A port nobody listens on: bind, remember the port, close.
int dead_port() {
  httplib::Server s;
  return s.bind_to_any_port("127.0.0.1");
}

TEST(Nl, UnreachableBackendThrowsAndFallbackRecovers) {
  AkgGraph g = demo();
  auto catalog = nl::make_catalog(g);
  std::string url = "http://127.0.0.1:" + std::to_string(dead_port()) + "/v1";
  auto remote = std::make_shared<const nl::ChatCompletionBackend>(nl::RemoteConfig{url, "m", "", std::chrono::seconds(2)});
  try {
    remote->classify("why did the battery not arrive in time", catalog);
    FAIL() << "expected BackendUnavailable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BackendUnavailable);
  }
  nl::FallbackBackend fb(remote, std::make_shared<const nl::DeterministicBackend>());
  auto c = fb.classify("why did the battery not arrive in time", catalog);
  EXPECT_EQ(c.intent, Intent::Diagnose);
  EXPECT_EQ(c.slots.node, g.expand("ex:BatteryLate"));
  EXPECT_EQ(c.backend, "deterministic (fallback)");
}

TEST(Nl, BackendFromEnvironment) {
  unsetenv("PPR_LLM_URL");
  EXPECT_EQ(nl::backend_from_env()->name(), "deterministic");
  setenv("PPR_LLM_URL", "http://127.0.0.1:9/v1", 1);
  setenv("PPR_LLM_MODEL", "m1", 1);
  EXPECT_EQ(nl::backend_from_env()->name(), "chat-completion:m1+deterministic");
  setenv("PPR_LLM_FALLBACK", "0", 1);
  EXPECT_EQ(nl::backend_from_env()->name(), "chat-completion:m1");
  unsetenv("PPR_LLM_URL");
  unsetenv("PPR_LLM_MODEL");
  unsetenv("PPR_LLM_FALLBACK");
}

}  // namespace
}  // namespace ppr
