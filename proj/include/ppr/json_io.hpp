#pragma once

#include <vector>

#include <json.hpp>

#include "ppr/diagnosis.hpp"
#include "ppr/graph.hpp"
#include "ppr/matchmaker.hpp"
#include "ppr/scheduler.hpp"
#include "ppr/turtle.hpp"
#include "ppr/validator.hpp"

// JSON shapes shared by the HTTP service and `--json` CLI output. IRIs are
// always written expanded.
namespace ppr::jsonio {

using nlohmann::json;

/// {"type": "number"|"text"|"boolean"|"set"|"iri", "value": ...}; numbers
/// also carry "lexical".
json attr_value(const AttrValue& value);
json edge(const Edge& e);
json node(const Node& n);
json run(const ProcessRun& r);

/// {"prefixes": {...}, "nodes": [...], "edges": [...], "runs": [...]}
json graph(const AkgGraph& g);
/// One node plus every edge touching it.
json node_listing(const AkgGraph& g, const Iri& iri);

json violations(const std::vector<Violation>& v);
json match_report(const MatchReport& r);
json impact_report(const ImpactReport& r);
json schedule(const Schedule& s);
json diagnosis(const AkgGraph& g, const DiagnosisReport& r);
json catalog(const AkgGraph& g, const std::vector<ConditionEntry>& entries);
json parse_errors(const std::vector<ttl::ParseError>& errors);

}  // namespace ppr::jsonio
