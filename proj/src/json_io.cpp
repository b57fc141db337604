#include "ppr/json_io.hpp"

#include "ppr/capability.hpp"

namespace ppr::jsonio {

json attr_value(const AttrValue& value) {
  json out{{"type", to_string(value.type())}};
  switch (value.type()) {
    case AttrValue::Type::Number:
      out["value"] = value.as_number().value;
      out["lexical"] = value.as_number().lexical;
      break;
    case AttrValue::Type::Text: out["value"] = value.as_text(); break;
    case AttrValue::Type::Boolean: out["value"] = value.as_bool(); break;
    case AttrValue::Type::TextSet: out["value"] = value.as_set(); break;
    case AttrValue::Type::IriRef: out["value"] = value.as_iri().iri; break;
  }
  return out;
}

json edge(const Edge& e) {
  return {{"subject", e.subject.value}, {"predicate", to_string(e.kind)}, {"object", e.object.value}};
}

json node(const Node& n) {
  json attrs = json::object();
  for (const auto& [name, value] : n.attrs) attrs[name] = attr_value(value);
  return {{"iri", n.iri.value}, {"kind", to_string(n.kind)}, {"label", n.label}, {"attributes", attrs}};
}

namespace {

json iris(const std::vector<Iri>& list) {
  json out = json::array();
  for (const auto& i : list) out.push_back(i.value);
  return out;
}

}  // namespace

json run(const ProcessRun& r) {
  return {{"run_id", r.run_id},
          {"product_class", r.product_class.value},
          {"product_instance", r.product_instance.value},
          {"steps", iris(r.steps)},
          {"created_at", r.created_at}};
}

json graph(const AkgGraph& g) {
  json nodes = json::array();
  for (const auto& [iri, n] : g.nodes()) nodes.push_back(node(n));
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back(edge(e));
  json runs = json::array();
  for (const auto& [id, r] : g.runs()) runs.push_back(run(r));
  return {{"prefixes", g.prefixes()}, {"nodes", nodes}, {"edges", edges}, {"runs", runs}};
}

json node_listing(const AkgGraph& g, const Iri& iri) {
  json edges = json::array();
  for (const auto& e : g.edges()) {
    if (e.subject == iri || e.object == iri) edges.push_back(edge(e));
  }
  return {{"nodes", json::array({node(g.node(iri))})}, {"edges", edges}};
}

json violations(const std::vector<Violation>& v) {
  json list = json::array();
  for (const auto& x : v) {
    list.push_back({{"rule_id", x.rule_id},
                    {"severity", to_string(x.severity)},
                    {"subject", x.subject.value},
                    {"message", x.message}});
  }
  auto errors = count_errors(v);
  return {{"violations", list}, {"error_count", errors}, {"warning_count", v.size() - errors}};
}

json match_report(const MatchReport& r) {
  json explanations = json::array();
  for (const auto& ex : r.explanations) {
    json reqs = json::array();
    for (const auto& rc : ex.requirements) {
      json cands = json::array();
      for (const auto& cc : rc.candidates) {
        json checks = json::array();
        for (const auto& chk : cc.checks) {
          checks.push_back({{"constraint", format_constraint(chk.constraint)},
                            {"satisfied", chk.satisfied},
                            {"witness", chk.witness ? attr_value(*chk.witness) : json(nullptr)}});
        }
        cands.push_back({{"capability", cc.capability.value},
                         {"kind_matches", cc.kind_matches},
                         {"satisfied", cc.satisfied},
                         {"checks", checks}});
      }
      reqs.push_back({{"requirement", rc.requirement.value}, {"satisfied", rc.satisfied}, {"candidates", cands}});
    }
    explanations.push_back({{"resource", ex.resource.value}, {"eligible", ex.eligible}, {"requirements", reqs}});
  }
  return {{"step", r.step.value},
          {"process_class", r.process_class.value},
          {"eligible", iris(r.eligible)},
          {"explanations", explanations}};
}

json impact_report(const ImpactReport& r) {
  json impacts = json::array();
  for (const auto& i : r.impacts) {
    impacts.push_back({{"process", i.process.value},
                       {"before", iris(i.before)},
                       {"after", iris(i.after)},
                       {"starved", i.starved}});
  }
  return {{"resource", r.resource.value},
          {"capability", r.capability.value},
          {"action", to_string(r.action)},
          {"impacts", impacts}};
}

json schedule(const Schedule& s) {
  json assignments = json::array();
  for (const auto& a : s.assignments) {
    assignments.push_back({{"step", a.step.value},
                           {"resource", a.resource.value},
                           {"start_s", a.start_s},
                           {"duration_s", a.duration_s}});
  }
  return {{"assignments", assignments}, {"makespan_s", s.makespan_s}};
}

json diagnosis(const AkgGraph& g, const DiagnosisReport& r) {
  json ctx{{"condition", r.context.condition.value}};
  if (r.context.affected_step) ctx["affected_step"] = r.context.affected_step->value;
  if (r.context.observed_on_resource) ctx["observed_on_resource"] = r.context.observed_on_resource->value;
  json causes = json::array();
  for (const auto& c : r.causes) {
    json evidence = json::array();
    for (const auto& e : c.evidence) evidence.push_back(edge(e));
    causes.push_back({{"cause", c.cause.value},
                      {"label", g.node(c.cause).label},
                      {"scope", to_string(c.scope)},
                      {"weight", c.weight},
                      {"evidence", evidence}});
  }
  return {{"context", ctx}, {"causes", causes}};
}

json catalog(const AkgGraph& g, const std::vector<ConditionEntry>& entries) {
  json list = json::array();
  for (const auto& e : entries) {
    list.push_back({{"condition", e.condition.value},
                    {"label", g.node(e.condition).label},
                    {"affected", iris(e.affected)}});
  }
  return {{"conditions", list}};
}

json parse_errors(const std::vector<ttl::ParseError>& errors) {
  json list = json::array();
  for (const auto& e : errors) {
    list.push_back({{"line", e.line}, {"column", e.column}, {"message", e.message}, {"snippet", e.snippet}});
  }
  return list;
}

}  // namespace ppr::jsonio
