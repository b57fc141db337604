#include "ppr/service.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "ppr/diagnosis.hpp"
#include "ppr/matchmaker.hpp"
#include "ppr/turtle.hpp"
#include "ppr/validator.hpp"

namespace ppr {

json ApiResponse::envelope() const {
  json errs = json::array();
  for (const auto& e : errors) errs.push_back({{"code", e.code}, {"message", e.message}});
  return {{"ok", ok()}, {"data", data}, {"errors", errs}, {"graph_version", graph_version}};
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidAttr:
      return 400;
    case ErrorCode::UnknownNode:
      return 404;
    case ErrorCode::DuplicateIri:
    case ErrorCode::TypeViolation:
    case ErrorCode::CycleIntroduced:
    case ErrorCode::MissingEdge:
    case ErrorCode::StaleSchedule:
      return 409;
    case ErrorCode::NotAProductClass:
    case ErrorCode::NotAProcess:
    case ErrorCode::KindMismatch:
    case ErrorCode::EmptyProcessDefinition:
    case ErrorCode::StarvedStep:
    case ErrorCode::InvalidInstance:
    case ErrorCode::InstanceTooLarge:
    case ErrorCode::TypeMismatch:
      return 422;
    case ErrorCode::BackendUnavailable:
      return 503;
  }
  return 500;
}

namespace {

ApiResponse success(json data, std::uint64_t version) {
  ApiResponse r;
  r.data = std::move(data);
  r.graph_version = version;
  return r;
}

ApiResponse failure(int status, std::string code, std::string message, std::uint64_t version) {
  ApiResponse r;
  r.status = status;
  r.data = nullptr;
  r.errors.push_back({std::move(code), std::move(message)});
  r.graph_version = version;
  return r;
}

ApiResponse failure(const Error& e, std::uint64_t version) {
  return failure(http_status(e.code()), std::string(to_string(e.code())), e.what(), version);
}

const json& field(const json& body, const char* name) {
  if (!body.is_object() || !body.contains(name)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("missing field '{}'", name));
  }
  return body.at(name);
}

std::string string_field(const json& body, const char* name) {
  const json& v = field(body, name);
  if (!v.is_string()) throw Error(ErrorCode::InvalidArgument, fmt::format("field '{}' must be a string", name));
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const json& body, const char* name) {
  if (!body.is_object() || !body.contains(name) || body.at(name).is_null()) return std::nullopt;
  return string_field(body, name);
}

std::size_t count_field(const json& body, const char* name) {
  const json& v = field(body, name);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("field '{}' must be a positive integer", name));
  }
  return v.get<std::size_t>();
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n\f\v");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n\f\v");
  return std::string(s.substr(b, e - b + 1));
}

const std::string& label_of(const AkgGraph& g, const Iri& iri) {
  const Node* n = g.find(iri);
  return n && !n->label.empty() ? n->label : iri.value;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Fixed answer templates; everything they say comes from the structured result.
std::string diagnosis_text(const AkgGraph& g, const DiagnosisReport& r) {
  const auto& cond = label_of(g, r.context.condition);
  if (r.causes.empty()) return fmt::format("No plausible causes are recorded for \"{}\".", cond);
  std::vector<std::string> items;
  for (std::size_t i = 0; i < r.causes.size(); ++i) {
    const auto& c = r.causes[i];
    std::string scope = c.scope == CauseScope::Global ? "global" : "resource-specific";
    if (c.scope == CauseScope::ResourceSpecific && c.evidence.size() > 1) {
      std::vector<std::string> owners;
      for (std::size_t k = 1; k < c.evidence.size(); ++k) owners.push_back(label_of(g, c.evidence[k].subject));
      scope += ", " + join(owners, ", ");
    }
    items.push_back(fmt::format("{}. {} ({}, weight {:.2f})", i + 1, label_of(g, c.cause), scope, c.weight));
  }
  return fmt::format("Plausible causes for \"{}\", most likely first: {}.", cond, join(items, "; "));
}

std::string schedule_text(const AkgGraph& g, const Iri& product, std::size_t n, const Schedule& s) {
  std::vector<std::string> resources;
  for (const auto& a : s.assignments) resources.push_back(label_of(g, a.resource));
  std::sort(resources.begin(), resources.end());
  resources.erase(std::unique(resources.begin(), resources.end()), resources.end());
  return fmt::format("Feasible schedule for {} run(s) of \"{}\": {} step(s) on {}, makespan {} s.", n,
                     label_of(g, product), s.assignments.size(), join(resources, ", "), s.makespan_s);
}

std::string match_text(const AkgGraph& g, const MatchReport& r) {
  const auto& step = label_of(g, r.step);
  if (r.eligible.empty()) return fmt::format("No resource can currently execute \"{}\".", step);
  std::vector<std::string> names;
  for (const auto& e : r.eligible) names.push_back(label_of(g, e));
  return fmt::format("{} resource(s) can execute \"{}\": {}.", r.eligible.size(), step, join(names, ", "));
}

std::string lookup_text(const AkgGraph& g, const Iri& iri) {
  std::size_t touching = 0;
  for (const auto& e : g.edges()) touching += e.subject == iri || e.object == iri;
  return fmt::format("\"{}\" is a {} with {} connected edge(s).", label_of(g, iri), to_string(g.node(iri).kind),
                     touching);
}

constexpr const char* kGuidance =
    "I could not relate the question to the model. Try \"Why did <condition> happen?\", "
    "\"Schedule <n> runs of <product>\" or \"Which resource can <process>?\".";

}  // namespace

SchedulePolicy policy_from_json(const json& policy) {
  SchedulePolicy p;
  if (policy.is_null()) return p;
  if (!policy.is_object()) throw Error(ErrorCode::InvalidArgument, "policy must be an object");
  if (policy.contains("improve")) {
    if (!policy["improve"].is_boolean()) throw Error(ErrorCode::InvalidArgument, "policy.improve must be a boolean");
    p.improve = policy["improve"].get<bool>();
  }
  if (policy.contains("max_iterations")) {
    if (!policy["max_iterations"].is_number_unsigned()) {
      throw Error(ErrorCode::InvalidArgument, "policy.max_iterations must be a non-negative integer");
    }
    p.max_iterations = policy["max_iterations"].get<std::size_t>();
  }
  return p;
}

Engine::Engine(AkgGraph graph, std::shared_ptr<const nl::Backend> backend)
    : backend_(backend ? std::move(backend) : std::make_shared<const nl::DeterministicBackend>()) {
  current_.graph = std::make_shared<const AkgGraph>(std::move(graph));
  current_.version = 1;
}

Snapshot Engine::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return current_;
}

template <typename Fn>
ApiResponse Engine::read(Fn&& fn) const {
  Snapshot snap = snapshot();
  try {
    return success(fn(snap), snap.version);
  } catch (const Error& e) {
    return failure(e, snap.version);
  } catch (const json::exception& e) {
    return failure(400, "InvalidArgument", e.what(), snap.version);
  }
}

// fn(graph copy) returns the response data; the copy is published only when
// fn succeeds and actually changed something.
template <typename Fn>
ApiResponse Engine::mutate(Fn&& fn) {
  std::lock_guard writer(writer_mutex_);
  Snapshot base = snapshot();
  auto work = std::make_shared<AkgGraph>(*base.graph);
  json data;
  try {
    data = fn(*work);
  } catch (const Error& e) {
    return failure(e, base.version);
  } catch (const json::exception& e) {
    return failure(400, "InvalidArgument", e.what(), base.version);
  }
  if (work->version() == base.graph->version() && work->runs().size() == base.graph->runs().size()) {
    return success(std::move(data), base.version);
  }
  std::lock_guard lock(snapshot_mutex_);
  current_.graph = std::move(work);
  current_.version = base.version + 1;
  return success(std::move(data), current_.version);
}

ApiResponse Engine::export_graph() const {
  return read([](const Snapshot& s) { return jsonio::graph(*s.graph); });
}

ApiResponse Engine::node(std::string_view iri) const {
  return read([&](const Snapshot& s) {
    Iri id = s.graph->expand(iri);
    s.graph->node(id);
    return jsonio::node_listing(*s.graph, id);
  });
}

ApiResponse Engine::validate() const {
  return read([](const Snapshot& s) { return jsonio::violations(ppr::validate(*s.graph)); });
}

ApiResponse Engine::eligible(std::string_view step) const {
  return read([&](const Snapshot& s) { return jsonio::match_report(eligible_resources(*s.graph, s.graph->expand(step))); });
}

ApiResponse Engine::conditions(const std::optional<std::string>& asset) const {
  return read([&](const Snapshot& s) {
    std::optional<Iri> a;
    if (asset && !asset->empty()) a = s.graph->expand(*asset);
    return jsonio::catalog(*s.graph, condition_catalog(*s.graph, a));
  });
}

ApiResponse Engine::diagnose(const json& body) const {
  return read([&](const Snapshot& s) {
    const AkgGraph& g = *s.graph;
    ObservationContext ctx{g.expand(string_field(body, "condition")), std::nullopt, std::nullopt};
    if (auto step = optional_string(body, "affected_step")) ctx.affected_step = g.expand(*step);
    if (auto res = optional_string(body, "observed_on_resource")) ctx.observed_on_resource = g.expand(*res);
    return jsonio::diagnosis(g, plausible_causes(g, ctx));
  });
}

Schedule Engine::schedule_preview(const AkgGraph& graph, const Iri& product, std::size_t n,
                                  const SchedulePolicy& policy) {
  AkgGraph scratch = graph;
  auto runs = instantiate_run(scratch, product, n);
  return ppr::schedule(build_instance(scratch, runs), policy);
}

ApiResponse Engine::chat(const json& body) const {
  Snapshot snap = snapshot();
  std::string question;
  try {
    question = trim(string_field(body, "question"));
  } catch (const Error& e) {
    return failure(e, snap.version);
  }
  if (question.empty()) return failure(400, "InvalidArgument", "question is empty", snap.version);

  // Classification may call a remote service; it only sees a copied catalog.
  nl::Classification c;
  try {
    c = backend_->classify(question, nl::make_catalog(*snap.graph));
  } catch (const Error& e) {
    return failure(e, snap.version);
  }

  json data{{"intent", nl::to_string(c.intent)}, {"backend", c.backend}};
  if (c.slots.node) data["node"] = c.slots.node->value;
  if (c.intent == nl::Intent::Schedule) data["n"] = c.slots.n.value_or(1);

  // Run the operation on the newest snapshot, exactly as the direct endpoint would.
  snap = snapshot();
  const AkgGraph& g = *snap.graph;
  if (c.intent == nl::Intent::Unknown || !c.slots.node || !g.contains(*c.slots.node)) {
    data["intent"] = nl::to_string(nl::Intent::Unknown);
    data["answer_text"] = kGuidance;
    return success(std::move(data), snap.version);
  }

  const Iri& node = *c.slots.node;
  try {
    switch (c.intent) {
      case nl::Intent::Diagnose: {
        auto report = plausible_causes(g, {node, std::nullopt, std::nullopt});
        data["answer_text"] = diagnosis_text(g, report);
        data["structured"] = jsonio::diagnosis(g, report);
        break;
      }
      case nl::Intent::Schedule: {
        std::size_t n = c.slots.n.value_or(1);
        Schedule s = schedule_preview(g, node, n, {});
        data["answer_text"] = schedule_text(g, node, n, s);
        data["structured"] = jsonio::schedule(s);
        break;
      }
      case nl::Intent::Match: {
        auto report = eligible_resources(g, node);
        data["answer_text"] = match_text(g, report);
        data["structured"] = jsonio::match_report(report);
        break;
      }
      case nl::Intent::Lookup:
        data["answer_text"] = lookup_text(g, node);
        data["structured"] = jsonio::node_listing(g, node);
        break;
      case nl::Intent::Unknown:
        break;
    }
  } catch (const Error& e) {
    return failure(e, snap.version);
  }
  return success(std::move(data), snap.version);
}

ApiResponse Engine::ingest_turtle(std::string_view text, bool merge) {
  std::lock_guard writer(writer_mutex_);
  Snapshot base = snapshot();
  auto parsed = ttl::parse_turtle(text);
  if (!parsed.ok()) {
    ApiResponse r;
    r.status = 400;
    r.graph_version = base.version;
    r.data = {{"parse_errors", jsonio::parse_errors(parsed.errors)}};
    for (const auto& e : parsed.errors) r.errors.push_back({"ParseError", ttl::format_error(e)});
    return r;
  }
  auto work = merge ? std::make_shared<AkgGraph>(*base.graph) : std::make_shared<AkgGraph>();
  try {
    ttl::apply_delta(*work, parsed.delta, CycleCheck::Enforce);
  } catch (const Error& e) {
    return failure(e, base.version);
  }
  json data{{"nodes", work->nodes().size()}, {"edges", work->edges().size()}, {"merged", merge}};
  std::lock_guard lock(snapshot_mutex_);
  current_.graph = std::move(work);
  current_.version = base.version + 1;
  pending_.reset();
  return success(std::move(data), current_.version);
}

ApiResponse Engine::create_runs(const json& body) {
  return mutate([&](AkgGraph& g) {
    Iri product = g.expand(string_field(body, "product"));
    auto runs = instantiate_run(g, product, count_field(body, "n"));
    json list = json::array();
    for (const auto& r : runs) list.push_back(jsonio::run(r));
    return json{{"runs", list}};
  });
}

ApiResponse Engine::schedule(const json& body) {
  Snapshot snap = snapshot();
  try {
    SchedulePolicy policy = policy_from_json(body.is_object() && body.contains("policy") ? body["policy"] : json());
    if (body.is_object() && body.contains("product")) {
      Iri product = snap.graph->expand(string_field(body, "product"));
      return success(jsonio::schedule(schedule_preview(*snap.graph, product, count_field(body, "n"), policy)),
                     snap.version);
    }
    const json& ids = field(body, "run_ids");
    if (!ids.is_array() || ids.empty()) throw Error(ErrorCode::InvalidArgument, "run_ids must be a non-empty array");
    std::vector<ProcessRun> runs;
    for (const auto& id : ids) {
      if (!id.is_string()) throw Error(ErrorCode::InvalidArgument, "run_ids must hold strings");
      const ProcessRun* run = snap.graph->find_run(id.get<std::string>());
      if (!run) throw Error(ErrorCode::UnknownNode, "unknown run " + id.get<std::string>());
      runs.push_back(*run);
    }
    auto inst = build_instance(*snap.graph, runs);
    Schedule s = ppr::schedule(inst, policy);
    {
      std::lock_guard lock(snapshot_mutex_);
      pending_ = s;
    }
    return success(jsonio::schedule(s), snap.version);
  } catch (const Error& e) {
    return failure(e, snap.version);
  } catch (const json::exception& e) {
    return failure(400, "InvalidArgument", e.what(), snap.version);
  }
}

ApiResponse Engine::commit_schedule() {
  std::optional<Schedule> pending;
  {
    std::lock_guard lock(snapshot_mutex_);
    pending = pending_;
  }
  if (!pending) return failure(409, "StaleSchedule", "no pending schedule to commit", graph_version());
  auto r = mutate([&](AkgGraph& g) {
    ppr::commit_schedule(g, *pending);
    return jsonio::schedule(*pending);
  });
  if (r.ok()) {
    std::lock_guard lock(snapshot_mutex_);
    if (pending_ == pending) pending_.reset();
  }
  return r;
}

ApiResponse Engine::capability_change(std::string_view resource, const json& body) {
  return mutate([&](AkgGraph& g) {
    auto action_name = string_field(body, "action");
    auto action = capability_action_from_string(action_name);
    if (!action) throw Error(ErrorCode::InvalidArgument, "action must be 'add' or 'remove', got '" + action_name + "'");
    auto report = apply_capability_change(g, g.expand(resource), g.expand(string_field(body, "capability")), *action);
    return jsonio::impact_report(report);
  });
}

}  // namespace ppr
