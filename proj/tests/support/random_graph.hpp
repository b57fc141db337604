#pragma once

// Random valid graphs for property tests. Everything is driven by a caller
// supplied std::mt19937_64 so failures reproduce from the seed.

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "ppr/capability.hpp"
#include "ppr/diagnosis.hpp"
#include "ppr/graph.hpp"
#include "ppr/scheduler.hpp"

namespace ppr::testing {

inline int uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool coin(std::mt19937_64& rng, double p = 0.5) {
  return std::bernoulli_distribution(p)(rng);
}

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& items) {
  return items[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(items.size()) - 1))];
}

inline std::string random_text(std::mt19937_64& rng, int max_len = 12) {
  static const std::vector<std::string> pieces = {
      "a", "b", "Z", " ", "9", "_", "-", ".", ",", ";", "\"", "\\", "\n", "\t",
      "'", "#", ":", "<", ">", "{", "}", "\xC3\xA4", "\xE2\x82\xAC", "ge", "x y"};
  std::string out;
  int len = uniform(rng, 0, max_len);
  for (int i = 0; i < len; ++i) out += pick(rng, pieces);
  return out;
}

inline AttrValue random_number(std::mt19937_64& rng) {
  switch (uniform(rng, 0, 5)) {
    case 0: return AttrValue::number_lexical(std::to_string(uniform(rng, -1000, 1000)));
    case 1: return AttrValue::number_lexical(fmt::format("{}.{}", uniform(rng, 0, 99), uniform(rng, 0, 999)));
    case 2: return AttrValue::number_lexical(fmt::format("{}e{}", uniform(rng, 1, 9), uniform(rng, -3, 3)));
    case 3: return AttrValue::number_lexical(fmt::format("+{}", uniform(rng, 0, 50)));
    case 4: return AttrValue::number_lexical(fmt::format("-{}.5E+2", uniform(rng, 0, 9)));
    default: return AttrValue::number_lexical(fmt::format("00{}", uniform(rng, 0, 9)));
  }
}

inline AttrValue random_value(std::mt19937_64& rng) {
  switch (uniform(rng, 0, 4)) {
    case 0: return random_number(rng);
    case 1: return AttrValue::text(random_text(rng));
    case 2: return AttrValue::boolean(coin(rng));
    case 3: {
      AttrValue::TextSet s;
      int n = uniform(rng, 1, 3);
      for (int i = 0; i < n; ++i) s.insert(random_text(rng, 5));
      return AttrValue::set(std::move(s));
    }
    default: return AttrValue::iri(fmt::format("http://example.org/kind#K{}", uniform(rng, 0, 5)));
  }
}

inline std::string random_constraint(std::mt19937_64& rng) {
  static const std::vector<std::string> attrs = {"payload_kg", "torque_nm", "tool", "reach_mm"};
  switch (uniform(rng, 0, 3)) {
    case 0: return fmt::format("{} ge {}", pick(rng, attrs), uniform(rng, 0, 20));
    case 1: return fmt::format("{} lt {}.5", pick(rng, attrs), uniform(rng, 0, 20));
    case 2: return fmt::format("{} in {{hex,torx}}", pick(rng, attrs));
    default: return fmt::format("{} eq true", pick(rng, attrs));
  }
}

struct RandomGraphOptions {
  int max_nodes = 30;
  int max_triples = 200;
};

/// A graph that satisfies every structural invariant: typed edges, acyclic
/// hasSuccessor, valid reserved attributes. Triples counted as one per type,
/// label, edge and attribute.
inline AkgGraph random_graph(std::mt19937_64& rng, const RandomGraphOptions& opt = {}) {
  AkgGraph g;
  static const std::vector<std::pair<std::string, std::string>> namespaces = {
      {"ex", "http://example.org/ns#"},
      {"lab", "http://lab.example.com/assets/"},
      {"", "urn:x-default:"},
      {"deep", "http://example.org/ns#sub/"},
  };
  for (const auto& [p, base] : namespaces) {
    if (coin(rng, 0.7)) g.set_prefix(p, base);
  }

  int triples = 0;
  int node_count = uniform(rng, 0, opt.max_nodes);
  std::vector<Iri> iris;
  for (int i = 0; i < node_count && triples < opt.max_triples - 4; ++i) {
    std::string base = pick(rng, namespaces).second;
    std::string local = coin(rng, 0.85) ? fmt::format("N{}", i)
                                        : fmt::format("odd.{}/x{}", i, i);
    Iri iri{base + local};
    NodeKind kind = kAllNodeKinds[static_cast<std::size_t>(uniform(rng, 0, 8))];
    std::string label = coin(rng, 0.8) ? random_text(rng) : "";
    Attributes attrs;
    int nattrs = uniform(rng, 0, 3);
    for (int a = 0; a < nattrs; ++a) {
      std::string name = coin(rng, 0.8) ? fmt::format("attr_{}", uniform(rng, 0, 6))
                                        : fmt::format("http://example.org/attr#a{}", a);
      attrs[name] = random_value(rng);
    }
    if (kind == NodeKind::RequiredCapability && coin(rng)) {
      AttrValue::TextSet cs;
      int n = uniform(rng, 1, 2);
      for (int c = 0; c < n; ++c) cs.insert(random_constraint(rng));
      attrs[std::string(kAttrConstraint)] = AttrValue::set(std::move(cs));
    }
    if ((kind == NodeKind::RequiredCapability || kind == NodeKind::ProvidedCapability) &&
        coin(rng)) {
      attrs[std::string(kAttrCapabilityKind)] =
          AttrValue::iri(fmt::format("http://example.org/kind#K{}", uniform(rng, 0, 2)));
    }
    if (kind == NodeKind::ProcessClass && coin(rng)) {
      attrs[std::string(kAttrDuration)] = AttrValue::number_lexical(std::to_string(uniform(rng, 1, 90)));
    }
    triples += 1 + (label.empty() ? 0 : 1) + static_cast<int>(attrs.size());
    g.add_node(iri, kind, label, std::move(attrs));
    iris.push_back(iri);
  }

  if (!iris.empty()) {
    std::map<NodeKind, std::vector<Iri>> by_kind;
    for (const auto& iri : iris) by_kind[g.node(iri).kind].push_back(iri);
    int attempts = uniform(rng, 0, 150);
    for (int i = 0; i < attempts && triples < opt.max_triples; ++i) {
      EdgeKind kind = kAllEdgeKinds[static_cast<std::size_t>(uniform(rng, 0, 10))];
      auto pairs = permitted_pairs(kind);
      const auto& [sk, ok] = pairs[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(pairs.size()) - 1))];
      if (by_kind[sk].empty() || by_kind[ok].empty()) continue;
      const Iri& s = pick(rng, by_kind[sk]);
      const Iri& o = pick(rng, by_kind[ok]);
      // Orient successor edges by IRI so the DAG invariant always holds.
      if (kind == EdgeKind::hasSuccessor && !(s < o)) continue;
      if (g.has_edge(s, kind, o)) continue;
      g.add_edge(s, kind, o);
      ++triples;
    }
  }
  return g;
}

// ------------------------------------------------------------- matchmaking

inline const std::vector<std::string>& match_attribute_names() {
  static const std::vector<std::string> names = {"payload_kg", "torque_nm", "tool", "mobile"};
  return names;
}

/// Mostly well-typed values with the occasional misfit so type errors occur.
inline AttrValue random_match_value(std::mt19937_64& rng, const std::string& name) {
  static const std::vector<std::string> numbers = {"5", "10", "12", "12.0", "15", "20", "1e1"};
  static const std::vector<std::string> tools = {"hex", "torx", "12", "true"};
  bool misfit = coin(rng, 0.08);
  if (name == "tool" || misfit) {
    if (coin(rng, 0.3)) {
      AttrValue::TextSet set;
      int n = uniform(rng, 1, 2);
      for (int i = 0; i < n; ++i) set.insert(pick(rng, tools));
      return AttrValue::set(std::move(set));
    }
    return AttrValue::text(pick(rng, tools));
  }
  if (name == "mobile") return AttrValue::boolean(coin(rng));
  return AttrValue::number_lexical(pick(rng, numbers));
}

inline Attributes random_match_attributes(std::mt19937_64& rng) {
  Attributes attrs;
  for (const auto& name : match_attribute_names()) {
    if (coin(rng, 0.65)) attrs[name] = random_match_value(rng, name);
  }
  return attrs;
}

inline std::string random_match_constraint(std::mt19937_64& rng) {
  static const std::vector<std::string> ops = {"eq", "ne", "lt", "le", "gt", "ge", "in"};
  static const std::vector<std::string> thresholds = {"5", "10", "12", "15", "12.0"};
  static const std::vector<std::string> sets = {"{hex,torx}", "{hex}", "{12,true}", "{torx,5,10}"};
  static const std::vector<std::string> eq_values = {"10", "12", "hex", "torx", "true", "false", "1e1"};
  const std::string& attr = pick(rng, match_attribute_names());
  const std::string& op = pick(rng, ops);
  if (op == "in") return attr + " in " + pick(rng, sets);
  if (op == "eq" || op == "ne") return attr + " " + op + " " + pick(rng, eq_values);
  // Ordering mostly on numeric attributes; sometimes on the others.
  std::string target = coin(rng, 0.85) ? (coin(rng) ? "payload_kg" : "torque_nm") : attr;
  return target + " " + op + " " + pick(rng, thresholds);
}

struct MatchGraph {
  AkgGraph graph;
  std::vector<Iri> processes;
  std::vector<Iri> steps;  // one step instance per process
  std::vector<Iri> resources;
  std::vector<Iri> provided;
};

/// Processes with requirements, resources with capabilities, one step
/// instance per process.
inline MatchGraph random_match_graph(std::mt19937_64& rng, int max_resources = 5, int max_processes = 5) {
  MatchGraph m;
  AkgGraph& g = m.graph;
  auto kind = [&] { return AttrValue::iri(fmt::format("http://example.org/kind#K{}", uniform(rng, 0, 1))); };

  std::vector<Iri> required;
  int nreq = uniform(rng, 0, 5);
  for (int i = 0; i < nreq; ++i) {
    Attributes attrs{{"capability_kind", kind()}};
    AttrValue::TextSet cs;
    int nc = uniform(rng, 0, 3);
    for (int c = 0; c < nc; ++c) cs.insert(random_match_constraint(rng));
    if (!cs.empty()) attrs["constraint"] = AttrValue::set(std::move(cs));
    required.emplace_back(fmt::format("http://example.org/m#Req{}", i));
    g.add_node(required.back(), NodeKind::RequiredCapability, "", std::move(attrs));
  }
  int nprov = uniform(rng, 0, 8);
  for (int i = 0; i < nprov; ++i) {
    Attributes attrs = random_match_attributes(rng);
    attrs["capability_kind"] = kind();
    m.provided.emplace_back(fmt::format("http://example.org/m#Cap{}", i));
    g.add_node(m.provided.back(), NodeKind::ProvidedCapability, "", std::move(attrs));
  }
  int nres = uniform(rng, 0, max_resources);
  for (int i = 0; i < nres; ++i) {
    m.resources.emplace_back(fmt::format("http://example.org/m#R{}", i));
    g.add_node(m.resources.back(), NodeKind::Resource, "");
    for (const auto& cap : m.provided) {
      if (coin(rng, 0.35)) g.add_edge(m.resources.back(), EdgeKind::providesCapability, cap);
    }
  }
  int nproc = uniform(rng, 1, max_processes);
  for (int i = 0; i < nproc; ++i) {
    m.processes.emplace_back(fmt::format("http://example.org/m#P{}", i));
    g.add_node(m.processes.back(), NodeKind::ProcessClass, "");
    for (const auto& req : required) {
      if (coin(rng, 0.4)) g.add_edge(m.processes.back(), EdgeKind::requiresCapability, req);
    }
    m.steps.emplace_back(fmt::format("http://example.org/m#P{}__s", i));
    g.add_node(m.steps.back(), NodeKind::ProcessStepInstance, "");
    g.add_edge(m.steps.back(), EdgeKind::instanceOf, m.processes.back());
  }
  return m;
}

// -------------------------------------------------------------- scheduling

/// Precedence only from lower to higher index, so it is acyclic.
inline SchedulingInstance random_instance(std::mt19937_64& rng, int max_steps = 6, int max_resources = 3,
                                          int max_duration = 9) {
  SchedulingInstance inst;
  int nres = uniform(rng, 1, max_resources);
  for (int r = 0; r < nres; ++r) inst.resources.emplace_back(fmt::format("urn:r:R{}", r));
  int n = uniform(rng, 1, max_steps);
  for (int i = 0; i < n; ++i) {
    SchedulingStep st;
    st.step = Iri{fmt::format("urn:s:S{}", i)};
    st.duration_s = uniform(rng, 1, max_duration);
    for (const auto& r : inst.resources) {
      if (coin(rng, 0.6)) st.eligible.push_back(r);
    }
    if (st.eligible.empty()) st.eligible.push_back(pick(rng, inst.resources));
    for (int j = 0; j < i; ++j) {
      if (coin(rng, 0.3)) st.predecessors.emplace_back(fmt::format("urn:s:S{}", j));
    }
    inst.steps.push_back(std::move(st));
  }
  return inst;
}

// --------------------------------------------------------------- diagnosis

struct DiagnosisGraph {
  AkgGraph graph;
  std::vector<Iri> conditions;
  std::vector<Iri> causes;
  std::vector<Iri> resources;
  std::vector<Iri> processes;
  std::vector<Iri> steps;
};

/// Conditions, causes (some scoped, some with out-of-range or missing
/// weights), resources with kind-only capabilities, processes and step
/// instances, a few of them allocated.
inline DiagnosisGraph random_diagnosis_graph(std::mt19937_64& rng) {
  DiagnosisGraph d;
  AkgGraph& g = d.graph;
  static const std::vector<std::string> weights = {"0.1", "0.5", "0.7", "0.9", "0.9", "1", "1.3", "-0.2", "0"};

  int nkinds = 3;
  std::vector<Iri> caps;
  for (int k = 0; k < nkinds; ++k) {
    caps.emplace_back(fmt::format("http://example.org/d#Cap{}", k));
    g.add_node(caps.back(), NodeKind::ProvidedCapability, "",
               {{"capability_kind", AttrValue::iri(fmt::format("http://example.org/kind#K{}", k))}});
  }
  std::vector<Iri> reqs;
  for (int k = 0; k < nkinds; ++k) {
    reqs.emplace_back(fmt::format("http://example.org/d#Req{}", k));
    g.add_node(reqs.back(), NodeKind::RequiredCapability, "",
               {{"capability_kind", AttrValue::iri(fmt::format("http://example.org/kind#K{}", k))}});
  }
  int nres = uniform(rng, 0, 4);
  for (int i = 0; i < nres; ++i) {
    d.resources.emplace_back(fmt::format("http://example.org/d#R{}", i));
    g.add_node(d.resources.back(), NodeKind::Resource, "");
    for (const auto& c : caps) {
      if (coin(rng, 0.5)) g.add_edge(d.resources.back(), EdgeKind::providesCapability, c);
    }
  }
  int nproc = uniform(rng, 1, 3);
  for (int i = 0; i < nproc; ++i) {
    d.processes.emplace_back(fmt::format("http://example.org/d#P{}", i));
    g.add_node(d.processes.back(), NodeKind::ProcessClass, "");
    for (const auto& r : reqs) {
      if (coin(rng, 0.4)) g.add_edge(d.processes.back(), EdgeKind::requiresCapability, r);
    }
    d.steps.emplace_back(fmt::format("http://example.org/d#P{}__s", i));
    g.add_node(d.steps.back(), NodeKind::ProcessStepInstance, "");
    g.add_edge(d.steps.back(), EdgeKind::instanceOf, d.processes.back());
    if (!d.resources.empty() && coin(rng, 0.4)) {
      g.add_edge(d.steps.back(), EdgeKind::allocatedTo, pick(rng, d.resources));
    }
  }
  int ncause = uniform(rng, 0, 8);
  for (int i = 0; i < ncause; ++i) {
    Attributes attrs;
    if (coin(rng, 0.8)) attrs["weight"] = AttrValue::number_lexical(pick(rng, weights));
    d.causes.emplace_back(fmt::format("http://example.org/d#C{}", i));
    g.add_node(d.causes.back(), NodeKind::PlausibleCause, "", std::move(attrs));
    for (const auto& r : d.resources) {
      if (coin(rng, 0.25)) g.add_edge(r, EdgeKind::definesCause, d.causes.back());
    }
  }
  int ncond = uniform(rng, 1, 4);
  for (int i = 0; i < ncond; ++i) {
    d.conditions.emplace_back(fmt::format("http://example.org/d#U{}", i));
    g.add_node(d.conditions.back(), NodeKind::UndesiredCondition, "");
    for (const auto& c : d.causes) {
      if (coin(rng, 0.5)) g.add_edge(d.conditions.back(), EdgeKind::hasPlausibleCause, c);
    }
    for (const auto& r : d.resources) {
      if (coin(rng, 0.3)) g.add_edge(d.conditions.back(), EdgeKind::affects, r);
    }
    for (const auto& p : d.processes) {
      if (coin(rng, 0.3)) g.add_edge(d.conditions.back(), EdgeKind::affects, p);
    }
  }
  return d;
}

/// Random context: condition, optionally a step (class or instance) and/or
/// an observed resource.
inline ObservationContext random_context(std::mt19937_64& rng, const DiagnosisGraph& d) {
  ObservationContext ctx{pick(rng, d.conditions), std::nullopt, std::nullopt};
  if (coin(rng, 0.5)) ctx.affected_step = coin(rng) ? pick(rng, d.processes) : pick(rng, d.steps);
  if (!d.resources.empty() && coin(rng, 0.4)) ctx.observed_on_resource = pick(rng, d.resources);
  return ctx;
}

}  // namespace ppr::testing
