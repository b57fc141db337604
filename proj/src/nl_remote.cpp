#include <algorithm>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "ppr/nl.hpp"

namespace ppr::nl {

namespace {

using nlohmann::json;

constexpr const char* kInstructions =
    "You route questions from factory operators to a knowledge-graph engine. "
    "Reply with a single JSON object and nothing else: "
    "{\"intent\": one of \"diagnose\", \"schedule\", \"match\", \"lookup\", \"unknown\", "
    "\"node\": the IRI of one node from the catalog or null, "
    "\"n\": number of production runs (schedule only) or null}. "
    "diagnose: why did an undesired condition happen (node is an UndesiredCondition). "
    "schedule: plan production runs (node is a ProductClass). "
    "match: which resources can execute a process (node is a ProcessClass). "
    "lookup: describe any node. "
    "Use unknown when nothing fits. Never answer the question yourself.";

std::string catalog_listing(const Catalog& catalog) {
  std::string out;
  for (const auto& e : catalog.nodes) out += fmt::format("{}\t{}\t{}\n", e.iri.value, to_string(e.kind), e.label);
  return out;
}

// Splits "https://host:port/v1" into "https://host:port" and "/v1".
std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) return {url, ""};
  std::string path = url.substr(path_start);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {url.substr(0, path_start), path};
}

}  // namespace

ChatCompletionBackend::ChatCompletionBackend(RemoteConfig config) : config_(std::move(config)) {}

Classification ChatCompletionBackend::interpret_reply(std::string_view content, const Catalog& catalog) {
  Classification unknown;
  auto open = content.find('{');
  auto close = content.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) return unknown;
  json reply = json::parse(content.substr(open, close - open + 1), nullptr, false);
  if (!reply.is_object() || !reply.contains("intent") || !reply["intent"].is_string()) return unknown;

  auto intent = intent_from_string(reply["intent"].get<std::string>());
  if (!intent || *intent == Intent::Unknown) return unknown;
  if (!reply.contains("node") || !reply["node"].is_string()) return unknown;

  const std::string node = reply["node"].get<std::string>();
  auto it = std::lower_bound(catalog.nodes.begin(), catalog.nodes.end(), node,
                             [](const CatalogEntry& e, const std::string& iri) { return e.iri.value < iri; });
  if (it == catalog.nodes.end() || it->iri.value != node || !slot_kind_allowed(*intent, it->kind)) return unknown;

  Classification c;
  c.intent = *intent;
  c.slots.node = it->iri;
  if (*intent == Intent::Schedule) {
    c.slots.n = 1;
    if (reply.contains("n") && !reply["n"].is_null()) {
      if (!reply["n"].is_number_integer() || reply["n"].get<long long>() < 1) return unknown;
      c.slots.n = reply["n"].get<std::size_t>();
    }
  }
  return c;
}

Classification ChatCompletionBackend::classify(std::string_view question, const Catalog& catalog) const {
  auto [origin, base_path] = split_url(config_.url);
  httplib::Client client(origin);
  if (!client.is_valid()) throw Error(ErrorCode::BackendUnavailable, "unsupported LLM URL: " + config_.url);
  auto secs = static_cast<time_t>(config_.timeout.count());
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);

  httplib::Headers headers;
  if (!config_.key.empty()) headers.emplace("Authorization", "Bearer " + config_.key);

  json body{{"model", config_.model},
            {"temperature", 0},
            {"messages",
             json::array({{{"role", "system"}, {"content", kInstructions}},
                          {{"role", "user"},
                           {"content", "Catalog (IRI, kind, label):\n" + catalog_listing(catalog) +
                                           "\nQuestion: " + std::string(question)}}})}};

  auto res = client.Post(base_path + "/chat/completions", headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::BackendUnavailable, "LLM request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::BackendUnavailable, fmt::format("LLM service answered HTTP {}", res->status));
  }
  json reply = json::parse(res->body, nullptr, false);
  const json* content = nullptr;
  if (reply.is_object() && reply.contains("choices") && reply["choices"].is_array() && !reply["choices"].empty()) {
    const json& choice = reply["choices"][0];
    if (choice.contains("message") && choice["message"].contains("content") &&
        choice["message"]["content"].is_string()) {
      content = &choice["message"]["content"];
    }
  }
  if (!content) throw Error(ErrorCode::BackendUnavailable, "LLM reply has no message content");

  auto c = interpret_reply(content->get<std::string>(), catalog);
  c.backend = name();
  return c;
}

}  // namespace ppr::nl
