#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ppr/graph.hpp"

// Natural-language front door. A backend only picks the intent and its slots;
// the engine runs the matching operation and renders the answer from a fixed
// template, so nothing in an answer comes from the backend itself.
namespace ppr::nl {

enum class Intent { Diagnose, Schedule, Match, Lookup, Unknown };
std::string_view to_string(Intent intent);
std::optional<Intent> intent_from_string(std::string_view name);

/// Node kinds a slot may refer to for each intent (all kinds for Lookup).
bool slot_kind_allowed(Intent intent, NodeKind kind);

struct CatalogEntry {
  Iri iri;
  NodeKind kind{};
  std::string label;
};

/// What a backend may see of the graph: copied out so classification can run
/// without holding any lock.
struct Catalog {
  std::vector<CatalogEntry> nodes;  // sorted by IRI
};

Catalog make_catalog(const AkgGraph& graph);

struct Slots {
  std::optional<Iri> node;
  std::optional<std::size_t> n;  // schedule only
};

struct Classification {
  Intent intent = Intent::Unknown;
  Slots slots;
  std::string backend;  // which backend decided
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  /// Throws Error(BackendUnavailable) when a remote service cannot be reached.
  virtual Classification classify(std::string_view question, const Catalog& catalog) const = 0;
};

/// Lower-cased word tokens with stop words removed.
std::vector<std::string> tokens(std::string_view text);
/// Label tokens plus the lower-cased local name and its camelCase parts.
std::vector<std::string> node_tokens(const CatalogEntry& entry);

/// Keyword rules: leading "why" -> diagnose, "schedule" -> schedule (first
/// integer is n, default 1), "which resource"/"who can" -> match, otherwise
/// lookup. The slot is the allowed node with the largest token overlap, ties by
/// IRI; no overlap at all gives Unknown.
Classification classify_deterministic(std::string_view question, const Catalog& catalog);
Classification classify_deterministic(std::string_view question, const AkgGraph& graph);

class DeterministicBackend : public Backend {
 public:
  std::string name() const override { return "deterministic"; }
  Classification classify(std::string_view question, const Catalog& catalog) const override {
    return classify_deterministic(question, catalog);
  }
};

struct RemoteConfig {
  std::string url;  // base URL of an OpenAI-style API, e.g. http://host:8080/v1
  std::string model;
  std::string key;
  std::chrono::seconds timeout{20};
};

/// Chat-completion client asking the model for {"intent", "node", "n"} JSON.
/// Answers naming an unknown node or an unsuitable kind become Unknown.
class ChatCompletionBackend : public Backend {
 public:
  explicit ChatCompletionBackend(RemoteConfig config);
  std::string name() const override { return "chat-completion:" + config_.model; }
  Classification classify(std::string_view question, const Catalog& catalog) const override;

  /// Interprets the model's reply text; exposed for tests.
  static Classification interpret_reply(std::string_view content, const Catalog& catalog);

 private:
  RemoteConfig config_;
};

/// Uses `fallback` whenever `primary` reports BackendUnavailable.
class FallbackBackend : public Backend {
 public:
  FallbackBackend(std::shared_ptr<const Backend> primary, std::shared_ptr<const Backend> fallback)
      : primary_(std::move(primary)), fallback_(std::move(fallback)) {}
  std::string name() const override { return primary_->name() + "+" + fallback_->name(); }
  Classification classify(std::string_view question, const Catalog& catalog) const override;

 private:
  std::shared_ptr<const Backend> primary_;
  std::shared_ptr<const Backend> fallback_;
};

/// PPR_LLM_URL / PPR_LLM_MODEL / PPR_LLM_KEY select the remote backend (with
/// deterministic fallback unless PPR_LLM_FALLBACK=0); otherwise deterministic.
std::shared_ptr<const Backend> backend_from_env();

}  // namespace ppr::nl
