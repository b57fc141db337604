#include "ppr/nl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <set>

namespace ppr::nl {

std::string_view to_string(Intent intent) {
  switch (intent) {
    case Intent::Diagnose: return "diagnose";
    case Intent::Schedule: return "schedule";
    case Intent::Match: return "match";
    case Intent::Lookup: return "lookup";
    case Intent::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<Intent> intent_from_string(std::string_view name) {
  for (auto i : {Intent::Diagnose, Intent::Schedule, Intent::Match, Intent::Lookup, Intent::Unknown}) {
    if (to_string(i) == name) return i;
  }
  return std::nullopt;
}

bool slot_kind_allowed(Intent intent, NodeKind kind) {
  switch (intent) {
    case Intent::Diagnose: return kind == NodeKind::UndesiredCondition;
    case Intent::Schedule: return kind == NodeKind::ProductClass;
    case Intent::Match: return kind == NodeKind::ProcessClass || kind == NodeKind::ProcessStepInstance;
    case Intent::Lookup: return true;
    case Intent::Unknown: return false;
  }
  return false;
}

Catalog make_catalog(const AkgGraph& graph) {
  Catalog c;
  c.nodes.reserve(graph.nodes().size());
  for (const auto& [iri, node] : graph.nodes()) c.nodes.push_back({iri, node.kind, node.label});
  return c;
}

namespace {

const std::set<std::string, std::less<>>& stop_words() {
  static const std::set<std::string, std::less<>> words = {
      "a",     "an",    "the",  "of",    "in",   "on",    "at",    "to",    "is",   "are",  "was",
      "were",  "be",    "been", "did",   "do",   "does",  "what",  "which", "who",  "whom", "why",
      "how",   "when",  "where", "for",  "and",  "or",    "not",   "no",    "can",  "could", "would",
      "should", "will", "i",    "me",    "my",   "we",    "our",   "you",   "your", "it",   "its",
      "this",  "that",  "these", "those", "there", "please", "with", "by",   "from", "as",   "about",
      "tell",  "show",  "give", "list"};
  return words;
}

bool word_char(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view local_name(std::string_view iri) {
  auto cut = iri.find_last_of("#/:");
  return cut == std::string_view::npos ? iri : iri.substr(cut + 1);
}

// "AgvBatteryLow" -> agv battery low; "AGV1_Transport" -> agv1 transport.
std::vector<std::string> camel_parts(std::string_view name) {
  std::vector<std::string> parts;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) parts.push_back(lower(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < name.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(name[i]);
    if (!word_char(c)) {
      flush();
      continue;
    }
    if (std::isupper(c) && !cur.empty()) {
      unsigned char prev = static_cast<unsigned char>(cur.back());
      bool next_lower = i + 1 < name.size() && std::islower(static_cast<unsigned char>(name[i + 1]));
      if (std::islower(prev) || std::isdigit(prev) || (std::isupper(prev) && next_lower)) flush();
    }
    cur += static_cast<char>(c);
  }
  flush();
  return parts;
}

std::optional<std::size_t> first_integer(std::string_view question) {
  for (std::size_t i = 0; i < question.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(question[i]))) continue;
    if (i > 0 && word_char(static_cast<unsigned char>(question[i - 1]))) continue;
    std::size_t j = i;
    while (j < question.size() && std::isdigit(static_cast<unsigned char>(question[j]))) ++j;
    if (j < question.size() && word_char(static_cast<unsigned char>(question[j]))) {
      i = j;
      continue;
    }
    std::size_t value = 0;
    auto [p, ec] = std::from_chars(question.data() + i, question.data() + j, value);
    if (ec == std::errc()) return value;
    i = j;
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::string> tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty() && !stop_words().count(cur)) out.push_back(cur);
    cur.clear();
  };
  for (char ch : text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (word_char(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::vector<std::string> node_tokens(const CatalogEntry& entry) {
  auto out = tokens(entry.label);
  auto local = local_name(entry.iri.value);
  std::string whole;
  for (char c : local) {
    if (word_char(static_cast<unsigned char>(c))) whole += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (!whole.empty()) out.push_back(whole);
  for (auto& p : camel_parts(local)) {
    if (!stop_words().count(p)) out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Classification classify_deterministic(std::string_view question, const Catalog& catalog) {
  Classification result;
  result.backend = "deterministic";
  const std::string q = lower(question);
  auto words = tokens(q);

  Intent intent = Intent::Lookup;
  std::string first_word;
  for (char c : q) {
    if (word_char(static_cast<unsigned char>(c))) {
      first_word += c;
    } else if (!first_word.empty()) {
      break;
    }
  }
  if (first_word == "why") {
    intent = Intent::Diagnose;
  } else if (q.find("schedule") != std::string::npos) {
    intent = Intent::Schedule;
  } else if (q.find("which resource") != std::string::npos || q.find("who can") != std::string::npos) {
    intent = Intent::Match;
  }

  std::set<std::string> qset(words.begin(), words.end());
  const CatalogEntry* best = nullptr;
  std::size_t best_overlap = 0;
  for (const auto& entry : catalog.nodes) {
    if (!slot_kind_allowed(intent, entry.kind)) continue;
    std::size_t overlap = 0;
    for (const auto& t : node_tokens(entry)) overlap += qset.count(t);
    // Strictly greater keeps the smallest IRI on ties (catalog is sorted).
    if (overlap > best_overlap) {
      best = &entry;
      best_overlap = overlap;
    }
  }
  if (!best) return result;

  result.intent = intent;
  result.slots.node = best->iri;
  if (intent == Intent::Schedule) result.slots.n = first_integer(q).value_or(1);
  return result;
}

Classification classify_deterministic(std::string_view question, const AkgGraph& graph) {
  return classify_deterministic(question, make_catalog(graph));
}

Classification FallbackBackend::classify(std::string_view question, const Catalog& catalog) const {
  try {
    return primary_->classify(question, catalog);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BackendUnavailable) throw;
    auto c = fallback_->classify(question, catalog);
    c.backend = fallback_->name() + " (fallback)";
    return c;
  }
}

std::shared_ptr<const Backend> backend_from_env() {
  auto deterministic = std::make_shared<const DeterministicBackend>();
  const char* url = std::getenv("PPR_LLM_URL");
  if (!url || !*url) return deterministic;
  RemoteConfig cfg;
  cfg.url = url;
  if (const char* m = std::getenv("PPR_LLM_MODEL")) cfg.model = m;
  if (const char* k = std::getenv("PPR_LLM_KEY")) cfg.key = k;
  auto remote = std::make_shared<const ChatCompletionBackend>(std::move(cfg));
  const char* fb = std::getenv("PPR_LLM_FALLBACK");
  if (fb && std::string_view(fb) == "0") return remote;
  return std::make_shared<const FallbackBackend>(remote, deterministic);
}

}  // namespace ppr::nl
