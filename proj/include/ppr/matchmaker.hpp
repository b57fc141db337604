#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "ppr/capability.hpp"
#include "ppr/graph.hpp"

namespace ppr {

/// Evaluates one constraint against an attribute map. A missing attribute is
/// unsatisfied. Throws TypeMismatch when an ordering operator meets a
/// non-numeric stored value.
bool constraint_satisfied(const Constraint& constraint, const Attributes& attributes);

/// Kind equality plus conjunction of all constraints.
bool capability_matches(const RequiredCapabilitySpec& req, const ProvidedCapabilitySpec& prov);

struct ConstraintCheck {
  Constraint constraint;
  bool satisfied = false;
  std::optional<AttrValue> witness;  // the provided value, when present
};

struct CapabilityCheck {
  Iri capability;
  bool kind_matches = false;
  std::vector<ConstraintCheck> checks;  // empty unless kind_matches
  bool satisfied = false;
};

struct RequirementCheck {
  Iri requirement;
  std::vector<CapabilityCheck> candidates;
  bool satisfied = false;
};

struct ResourceExplanation {
  Iri resource;
  bool eligible = false;
  std::vector<RequirementCheck> requirements;
};

struct MatchReport {
  Iri step;
  Iri process_class;
  std::vector<Iri> eligible;                     // sorted
  std::vector<ResourceExplanation> explanations; // one per resource, sorted
};

/// Accepts a ProcessClass or a ProcessStepInstance (which uses its class's
/// requirements). Throws UnknownNode, NotAProcess.
MatchReport eligible_resources(const AkgGraph& graph, const Iri& step);

enum class CapabilityAction { Add, Remove };
std::string_view to_string(CapabilityAction action);
std::optional<CapabilityAction> capability_action_from_string(std::string_view name);

struct ImpactEntry {
  Iri process;
  std::vector<Iri> before;
  std::vector<Iri> after;
  bool starved = false;  // eligible set became empty
};

struct ImpactReport {
  Iri resource;
  Iri capability;
  CapabilityAction action = CapabilityAction::Add;
  std::vector<ImpactEntry> impacts;  // ProcessClasses whose eligible set changed
};

/// Adds or removes `resource providesCapability capability` and reports which
/// process classes changed eligibility. Throws UnknownNode, KindMismatch,
/// MissingEdge (remove of an absent edge).
ImpactReport apply_capability_change(AkgGraph& graph, const Iri& resource,
                                     const Iri& capability, CapabilityAction action);

}  // namespace ppr
