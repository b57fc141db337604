#include "ppr/matchmaker.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace ppr {

std::string_view to_string(CapabilityAction action) {
  return action == CapabilityAction::Add ? "add" : "remove";
}

std::optional<CapabilityAction> capability_action_from_string(std::string_view name) {
  if (name == "add") return CapabilityAction::Add;
  if (name == "remove") return CapabilityAction::Remove;
  return std::nullopt;
}

namespace {

bool values_equal(const AttrValue& stored, const AttrValue& wanted) {
  if (stored.is_number() && wanted.is_number()) {
    return stored.as_number().value == wanted.as_number().value;
  }
  return stored == wanted;
}

bool member_of(const AttrValue& stored, const AttrValue::TextSet& set) {
  switch (stored.type()) {
    case AttrValue::Type::Text: return set.count(stored.as_text()) != 0;
    case AttrValue::Type::Number: return set.count(stored.as_number().lexical) != 0;
    case AttrValue::Type::Boolean: return set.count(stored.as_bool() ? "true" : "false") != 0;
    case AttrValue::Type::IriRef: return set.count(stored.as_iri().iri) != 0;
    case AttrValue::Type::TextSet:
      return !stored.as_set().empty() &&
             std::all_of(stored.as_set().begin(), stored.as_set().end(),
                         [&](const std::string& m) { return set.count(m) != 0; });
  }
  return false;
}

std::vector<Iri> eligible_for_class(const AkgGraph& graph, const Iri& process_class,
                                    std::vector<ResourceExplanation>* explanations) {
  std::vector<std::pair<Iri, RequiredCapabilitySpec>> requirements;
  for (const auto& r : graph.neighbors(process_class, EdgeKind::requiresCapability, Direction::Out)) {
    requirements.emplace_back(r, required_spec(graph.node(r)));
  }

  std::vector<Iri> eligible;
  for (const auto& resource : graph.nodes_of_kind(NodeKind::Resource)) {
    ResourceExplanation expl{resource, true, {}};
    auto provided = graph.neighbors(resource, EdgeKind::providesCapability, Direction::Out);
    for (const auto& [req_iri, req] : requirements) {
      RequirementCheck rc{req_iri, {}, false};
      for (const auto& cap_iri : provided) {
        auto prov = provided_spec(graph.node(cap_iri));
        CapabilityCheck cc{cap_iri, prov.capability_kind == req.capability_kind, {}, false};
        if (cc.kind_matches) {
          cc.satisfied = true;
          for (const auto& c : req.constraints) {
            ConstraintCheck check{c, constraint_satisfied(c, prov.attributes), std::nullopt};
            if (auto it = prov.attributes.find(c.attribute); it != prov.attributes.end()) {
              check.witness = it->second;
            }
            cc.satisfied = cc.satisfied && check.satisfied;
            cc.checks.push_back(std::move(check));
          }
        }
        rc.satisfied = rc.satisfied || cc.satisfied;
        rc.candidates.push_back(std::move(cc));
      }
      expl.eligible = expl.eligible && rc.satisfied;
      expl.requirements.push_back(std::move(rc));
    }
    if (expl.eligible) eligible.push_back(resource);
    if (explanations) explanations->push_back(std::move(expl));
  }
  return eligible;
}

Iri resolve_process_class(const AkgGraph& graph, const Iri& step) {
  const Node& node = graph.node(step);
  if (node.kind == NodeKind::ProcessClass) return step;
  if (node.kind == NodeKind::ProcessStepInstance) {
    auto classes = graph.neighbors(step, EdgeKind::instanceOf, Direction::Out);
    if (classes.size() != 1) {
      throw Error(ErrorCode::NotAProcess,
                  fmt::format("step {} has no unique process class", step.value));
    }
    return classes.front();
  }
  throw Error(ErrorCode::NotAProcess,
              fmt::format("{} is a {}, not a process", step.value, to_string(node.kind)));
}

}  // namespace

bool constraint_satisfied(const Constraint& constraint, const Attributes& attributes) {
  auto it = attributes.find(constraint.attribute);
  if (it == attributes.end()) return false;
  const AttrValue& stored = it->second;
  const AttrValue& wanted = constraint.value;
  switch (constraint.op) {
    case ConstraintOp::eq: return values_equal(stored, wanted);
    case ConstraintOp::ne: return !values_equal(stored, wanted);
    case ConstraintOp::in: return member_of(stored, wanted.as_set());
    default: break;
  }
  if (!stored.is_number()) {
    throw Error(ErrorCode::TypeMismatch,
                fmt::format("'{}' compares {} value '{}' with a number", format_constraint(constraint),
                            to_string(stored.type()), stored.to_display()));
  }
  double a = stored.as_number().value;
  double b = wanted.as_number().value;
  switch (constraint.op) {
    case ConstraintOp::lt: return a < b;
    case ConstraintOp::le: return a <= b;
    case ConstraintOp::gt: return a > b;
    case ConstraintOp::ge: return a >= b;
    default: return false;
  }
}

bool capability_matches(const RequiredCapabilitySpec& req, const ProvidedCapabilitySpec& prov) {
  if (req.capability_kind != prov.capability_kind) return false;
  bool all = true;
  // Every constraint is evaluated so type errors surface even after a miss.
  for (const auto& c : req.constraints) all = constraint_satisfied(c, prov.attributes) && all;
  return all;
}

MatchReport eligible_resources(const AkgGraph& graph, const Iri& step) {
  MatchReport report;
  report.step = step;
  report.process_class = resolve_process_class(graph, step);
  report.eligible = eligible_for_class(graph, report.process_class, &report.explanations);
  return report;
}

ImpactReport apply_capability_change(AkgGraph& graph, const Iri& resource, const Iri& capability,
                                     CapabilityAction action) {
  const Node& res = graph.node(resource);
  const Node& cap = graph.node(capability);
  if (res.kind != NodeKind::Resource) {
    throw Error(ErrorCode::KindMismatch, fmt::format("{} is not a Resource", resource.value));
  }
  if (cap.kind != NodeKind::ProvidedCapability) {
    throw Error(ErrorCode::KindMismatch,
                fmt::format("{} is not a ProvidedCapability", capability.value));
  }
  if (action == CapabilityAction::Remove &&
      !graph.has_edge(resource, EdgeKind::providesCapability, capability)) {
    throw Error(ErrorCode::MissingEdge, fmt::format("{} does not provide {}", resource.value,
                                                    capability.value));
  }

  if (action == CapabilityAction::Add &&
      graph.has_edge(resource, EdgeKind::providesCapability, capability)) {
    return ImpactReport{resource, capability, action, {}};
  }

  const auto processes = graph.nodes_of_kind(NodeKind::ProcessClass);
  std::vector<std::vector<Iri>> before;
  for (const auto& p : processes) before.push_back(eligible_for_class(graph, p, nullptr));

  if (action == CapabilityAction::Add) {
    graph.add_edge(resource, EdgeKind::providesCapability, capability);
  } else {
    graph.remove_edge(resource, EdgeKind::providesCapability, capability);
  }

  std::vector<std::vector<Iri>> after;
  try {
    for (const auto& p : processes) after.push_back(eligible_for_class(graph, p, nullptr));
  } catch (...) {
    if (action == CapabilityAction::Add) {
      graph.remove_edge(resource, EdgeKind::providesCapability, capability);
    } else {
      graph.add_edge(resource, EdgeKind::providesCapability, capability);
    }
    throw;
  }

  ImpactReport report{resource, capability, action, {}};
  for (std::size_t i = 0; i < processes.size(); ++i) {
    if (after[i] == before[i]) continue;
    bool starved = after[i].empty();
    report.impacts.push_back({processes[i], std::move(before[i]), std::move(after[i]), starved});
  }
  return report;
}

}  // namespace ppr
