#include "ppr/validator.hpp"

#include <algorithm>
#include <functional>

#include <fmt/format.h>

#include "ppr/capability.hpp"

namespace ppr {

std::string_view to_string(Severity severity) {
  return severity == Severity::Error ? "error" : "warning";
}

std::size_t count_errors(const std::vector<Violation>& violations) {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(),
                    [](const Violation& v) { return v.severity == Severity::Error; }));
}

namespace {

// Strongly connected components of the hasSuccessor subgraph (Tarjan).
std::vector<std::vector<Iri>> successor_cycles(const AkgGraph& graph) {
  std::map<Iri, int> index;
  std::map<Iri, int> low;
  std::set<Iri> on_stack;
  std::vector<Iri> stack;
  std::vector<std::vector<Iri>> cycles;
  int counter = 0;

  std::function<void(const Iri&)> connect = [&](const Iri& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto& w : graph.neighbors(v, EdgeKind::hasSuccessor, Direction::Out)) {
      if (!index.count(w)) {
        connect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack.count(w)) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] != index[v]) return;
    std::vector<Iri> component;
    Iri w;
    do {
      w = stack.back();
      stack.pop_back();
      on_stack.erase(w);
      component.push_back(w);
    } while (w != v);
    bool self_loop = graph.has_edge(v, EdgeKind::hasSuccessor, v);
    if (component.size() > 1 || self_loop) {
      std::sort(component.begin(), component.end());
      cycles.push_back(std::move(component));
    }
  };

  for (const auto& p : graph.nodes_of_kind(NodeKind::ProcessClass)) {
    if (!index.count(p)) connect(p);
  }
  return cycles;
}

}  // namespace

std::vector<Violation> validate(const AkgGraph& graph) {
  std::vector<Violation> out;
  auto report = [&](std::string rule, Severity severity, const Iri& subject, std::string message) {
    out.push_back({std::move(rule), severity, subject, std::move(message)});
  };

  std::set<std::string> provided_attributes;
  for (const auto& cap : graph.nodes_of_kind(NodeKind::ProvidedCapability)) {
    for (const auto& [name, value] : graph.node(cap).attrs) provided_attributes.insert(name);
  }

  for (const auto& [iri, node] : graph.nodes()) {
    switch (node.kind) {
      case NodeKind::ProcessClass:
        if (graph.neighbors(iri, EdgeKind::requiresCapability, Direction::Out).empty()) {
          report("V1", Severity::Error, iri,
                 fmt::format("process {} has no required capability", iri.value));
        }
        break;
      case NodeKind::Resource:
        if (graph.neighbors(iri, EdgeKind::providesCapability, Direction::Out).empty()) {
          report("V2", Severity::Error, iri,
                 fmt::format("resource {} provides no capability", iri.value));
        }
        break;
      case NodeKind::UndesiredCondition:
        if (graph.neighbors(iri, EdgeKind::hasPlausibleCause, Direction::Out).empty()) {
          report("V4", Severity::Warning, iri,
                 fmt::format("undesired condition {} has no plausible cause", iri.value));
        }
        break;
      case NodeKind::PlausibleCause: {
        auto definers = graph.neighbors(iri, EdgeKind::definesCause, Direction::In);
        if (definers.size() > 1) {
          std::vector<std::string> names;
          for (const auto& d : definers) names.push_back(d.value);
          report("V5", Severity::Error, iri,
                 fmt::format("cause {} is scoped to several resources: {}", iri.value,
                             fmt::join(names, ", ")));
        }
        break;
      }
      case NodeKind::ProductInstance:
      case NodeKind::ProcessStepInstance: {
        auto classes = graph.neighbors(iri, EdgeKind::instanceOf, Direction::Out);
        if (classes.size() != 1) {
          report("V6", Severity::Error, iri,
                 fmt::format("instance {} has {} instanceOf edges, expected 1", iri.value,
                             classes.size()));
        }
        break;
      }
      case NodeKind::RequiredCapability: {
        auto it = node.attrs.find(std::string(kAttrConstraint));
        if (it == node.attrs.end() || it->second.type() != AttrValue::Type::TextSet) break;
        std::set<std::string> unknown;
        for (const auto& text : it->second.as_set()) {
          auto c = parse_constraint(text);
          if (!provided_attributes.count(c.attribute)) unknown.insert(c.attribute);
        }
        for (const auto& name : unknown) {
          report("V8", Severity::Warning, iri,
                 fmt::format("constraint on '{}' which no provided capability carries", name));
        }
        break;
      }
      default:
        break;
    }
  }

  for (const auto& e : graph.edges()) {
    if (graph.node(e.subject).kind == NodeKind::ProcessClass &&
        graph.node(e.object).kind == NodeKind::Resource) {
      report("V3", Severity::Error, e.subject,
             fmt::format("process {} is assigned directly to resource {} via {}", e.subject.value,
                         e.object.value, to_string(e.kind)));
    }
  }

  for (const auto& cycle : successor_cycles(graph)) {
    std::vector<std::string> names;
    for (const auto& p : cycle) names.push_back(p.value);
    report("V7", Severity::Error, cycle.front(),
           fmt::format("hasSuccessor cycle through {}", fmt::join(names, ", ")));
  }

  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.rule_id, a.subject, a.message) < std::tie(b.rule_id, b.subject, b.message);
  });
  return out;
}

}  // namespace ppr
