#include "ppr/diagnosis.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "ppr/capability.hpp"
#include "ppr/matchmaker.hpp"

namespace ppr {

namespace {

void expect_kind(const AkgGraph& graph, const Iri& iri, std::initializer_list<NodeKind> kinds,
                 std::string_view role) {
  const Node& n = graph.node(iri);
  if (std::find(kinds.begin(), kinds.end(), n.kind) == kinds.end()) {
    throw Error(ErrorCode::KindMismatch,
                fmt::format("{} {} is a {}", role, iri.value, to_string(n.kind)));
  }
}

double cause_weight(const Node& cause) {
  auto it = cause.attrs.find(std::string(kAttrWeight));
  if (it == cause.attrs.end() || !it->second.is_number()) return kDefaultCauseWeight;
  return std::clamp(it->second.as_number().value, 0.0, 1.0);
}

// Resources against which scoped causes are filtered; nullopt keeps them all.
std::optional<std::set<Iri>> resolve_resources(const AkgGraph& graph, const ObservationContext& ctx) {
  if (ctx.observed_on_resource) return std::set<Iri>{*ctx.observed_on_resource};
  if (!ctx.affected_step) return std::nullopt;
  auto allocated = graph.neighbors(*ctx.affected_step, EdgeKind::allocatedTo, Direction::Out);
  if (!allocated.empty()) return std::set<Iri>(allocated.begin(), allocated.end());
  auto eligible = eligible_resources(graph, *ctx.affected_step).eligible;
  return std::set<Iri>(eligible.begin(), eligible.end());
}

}  // namespace

DiagnosisReport plausible_causes(const AkgGraph& graph, const ObservationContext& ctx) {
  expect_kind(graph, ctx.condition, {NodeKind::UndesiredCondition}, "condition");
  if (ctx.affected_step) {
    expect_kind(graph, *ctx.affected_step,
                {NodeKind::ProcessClass, NodeKind::ProcessStepInstance}, "affected step");
  }
  if (ctx.observed_on_resource) {
    expect_kind(graph, *ctx.observed_on_resource, {NodeKind::Resource}, "observed resource");
  }

  const auto resources = resolve_resources(graph, ctx);
  DiagnosisReport report{ctx, {}};
  for (const auto& cause : graph.neighbors(ctx.condition, EdgeKind::hasPlausibleCause, Direction::Out)) {
    RankedCause rc;
    rc.cause = cause;
    rc.scope = cause_scope(graph, cause);
    rc.weight = cause_weight(graph.node(cause));
    rc.evidence.push_back({ctx.condition, EdgeKind::hasPlausibleCause, cause});
    if (rc.scope == CauseScope::ResourceSpecific) {
      for (const auto& definer : graph.neighbors(cause, EdgeKind::definesCause, Direction::In)) {
        if (!resources || resources->count(definer)) {
          rc.evidence.push_back({definer, EdgeKind::definesCause, cause});
        }
      }
      if (rc.evidence.size() == 1) continue;
    }
    report.causes.push_back(std::move(rc));
  }
  std::sort(report.causes.begin(), report.causes.end(),
            [](const RankedCause& a, const RankedCause& b) {
              if (a.weight != b.weight) return a.weight > b.weight;
              return a.cause < b.cause;
            });
  return report;
}

std::vector<ConditionEntry> condition_catalog(const AkgGraph& graph, const std::optional<Iri>& asset) {
  if (asset) graph.node(*asset);
  std::vector<ConditionEntry> out;
  for (const auto& condition : graph.nodes_of_kind(NodeKind::UndesiredCondition)) {
    auto affected = graph.neighbors(condition, EdgeKind::affects, Direction::Out);
    if (asset && !std::binary_search(affected.begin(), affected.end(), *asset)) continue;
    out.push_back({condition, std::move(affected)});
  }
  return out;
}

}  // namespace ppr
