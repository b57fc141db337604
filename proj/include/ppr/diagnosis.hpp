#pragma once

#include <optional>
#include <vector>

#include "ppr/graph.hpp"

namespace ppr {

inline constexpr double kDefaultCauseWeight = 0.5;

struct ObservationContext {
  Iri condition;
  std::optional<Iri> affected_step;         // ProcessClass or ProcessStepInstance
  std::optional<Iri> observed_on_resource;  // Resource
};

struct RankedCause {
  Iri cause;
  CauseScope scope = CauseScope::Global;
  double weight = kDefaultCauseWeight;
  /// condition hasPlausibleCause cause, then the definesCause edges from the
  /// resolved resources for scoped causes.
  std::vector<Edge> evidence;
};

struct DiagnosisReport {
  ObservationContext context;
  std::vector<RankedCause> causes;  // weight desc, then IRI asc
};

/// Global causes of the condition, plus scoped causes whose defining resource
/// matches the context. The resource is taken from the observation, else from
/// the affected step's allocation, else from the step's eligible resources;
/// with no step and no resource every scoped cause is kept.
/// Throws UnknownNode, KindMismatch.
DiagnosisReport plausible_causes(const AkgGraph& graph, const ObservationContext& ctx);

struct ConditionEntry {
  Iri condition;
  std::vector<Iri> affected;  // sorted
};

/// All UndesiredConditions (sorted), optionally only those affecting `asset`.
std::vector<ConditionEntry> condition_catalog(const AkgGraph& graph,
                                              const std::optional<Iri>& asset = std::nullopt);

}  // namespace ppr
