#include "ppr/graph.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <queue>
#include <regex>

#include <fmt/format.h>

#include "ppr/capability.hpp"

namespace ppr {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateIri: return "DuplicateIri";
    case ErrorCode::InvalidAttr: return "InvalidAttr";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::TypeViolation: return "TypeViolation";
    case ErrorCode::CycleIntroduced: return "CycleIntroduced";
    case ErrorCode::NotAProductClass: return "NotAProductClass";
    case ErrorCode::EmptyProcessDefinition: return "EmptyProcessDefinition";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::NotAProcess: return "NotAProcess";
    case ErrorCode::MissingEdge: return "MissingEdge";
    case ErrorCode::StarvedStep: return "StarvedStep";
    case ErrorCode::InvalidInstance: return "InvalidInstance";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::StaleSchedule: return "StaleSchedule";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
  }
  return "Unknown";
}

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::ProductClass: return "ProductClass";
    case NodeKind::ProcessClass: return "ProcessClass";
    case NodeKind::RequiredCapability: return "RequiredCapability";
    case NodeKind::ProvidedCapability: return "ProvidedCapability";
    case NodeKind::Resource: return "Resource";
    case NodeKind::UndesiredCondition: return "UndesiredCondition";
    case NodeKind::PlausibleCause: return "PlausibleCause";
    case NodeKind::ProductInstance: return "ProductInstance";
    case NodeKind::ProcessStepInstance: return "ProcessStepInstance";
  }
  return "?";
}

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::hasInput: return "hasInput";
    case EdgeKind::hasOutput: return "hasOutput";
    case EdgeKind::hasSuccessor: return "hasSuccessor";
    case EdgeKind::requiresCapability: return "requiresCapability";
    case EdgeKind::providesCapability: return "providesCapability";
    case EdgeKind::hasUndesiredCondition: return "hasUndesiredCondition";
    case EdgeKind::hasPlausibleCause: return "hasPlausibleCause";
    case EdgeKind::definesCause: return "definesCause";
    case EdgeKind::affects: return "affects";
    case EdgeKind::instanceOf: return "instanceOf";
    case EdgeKind::allocatedTo: return "allocatedTo";
  }
  return "?";
}

std::optional<NodeKind> node_kind_from_string(std::string_view name) {
  for (auto k : kAllNodeKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::optional<EdgeKind> edge_kind_from_string(std::string_view name) {
  for (auto k : kAllEdgeKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(CauseScope scope) {
  return scope == CauseScope::Global ? "global" : "resource-specific";
}

bool is_class_level(NodeKind kind) {
  switch (kind) {
    case NodeKind::ProductClass:
    case NodeKind::ProcessClass:
    case NodeKind::RequiredCapability:
      return true;
    default:
      return false;
  }
}

bool is_instance_node(NodeKind kind) {
  return kind == NodeKind::ProductInstance ||
         kind == NodeKind::ProcessStepInstance;
}

namespace {

using K = NodeKind;
using Pair = std::pair<NodeKind, NodeKind>;

constexpr Pair kIoPairs[] = {{K::ProcessClass, K::ProductClass},
                             {K::ProcessStepInstance, K::ProductInstance}};
constexpr Pair kSuccessorPairs[] = {{K::ProcessClass, K::ProcessClass}};
constexpr Pair kRequiresPairs[] = {{K::ProcessClass, K::RequiredCapability}};
constexpr Pair kProvidesPairs[] = {{K::Resource, K::ProvidedCapability}};
constexpr Pair kHasConditionPairs[] = {
    {K::ProductClass, K::UndesiredCondition},
    {K::ProcessClass, K::UndesiredCondition},
    {K::RequiredCapability, K::UndesiredCondition},
    {K::Resource, K::UndesiredCondition},
    {K::ProductInstance, K::UndesiredCondition},
    {K::ProcessStepInstance, K::UndesiredCondition}};
constexpr Pair kCausePairs[] = {{K::UndesiredCondition, K::PlausibleCause}};
constexpr Pair kDefinesPairs[] = {{K::Resource, K::PlausibleCause}};
constexpr Pair kAffectsPairs[] = {{K::UndesiredCondition, K::ProcessClass},
                                  {K::UndesiredCondition, K::ProductClass},
                                  {K::UndesiredCondition, K::Resource},
                                  {K::UndesiredCondition, K::RequiredCapability}};
constexpr Pair kInstancePairs[] = {{K::ProductInstance, K::ProductClass},
                                   {K::ProcessStepInstance, K::ProcessClass}};
// ProcessClass -> Resource is storable so that the validator (V3) can flag it.
constexpr Pair kAllocatedPairs[] = {{K::ProcessStepInstance, K::Resource},
                                    {K::ProcessClass, K::Resource}};

bool is_pn_local(std::string_view s) {
  if (s.empty()) return false;
  auto ok = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  };
  if (!(std::isalnum(static_cast<unsigned char>(s.front())) || s.front() == '_'))
    return false;
  return std::all_of(s.begin(), s.end(), ok);
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s.front())) || s.front() == '_'))
    return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

bool looks_absolute(std::string_view s) {
  auto colon = s.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  for (std::size_t i = 0; i < colon; ++i) {
    char c = s[i];
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '+' ||
              c == '-' || c == '.';
    if (!ok) return false;
  }
  return std::none_of(s.begin(), s.end(), [](char c) {
    return c == ' ' || c == '<' || c == '>' || c == '"' || c == '\n';
  });
}

}  // namespace

void check_attribute(NodeKind kind, const std::string& name, const AttrValue& value) {
  if (!is_valid_attr_name(name)) {
    throw Error(ErrorCode::InvalidAttr, fmt::format("invalid attribute name '{}'", name));
  }
  if (value.type() == AttrValue::Type::TextSet && value.as_set().empty()) {
    throw Error(ErrorCode::InvalidAttr, fmt::format("attribute '{}' is an empty set", name));
  }
  if (name == kAttrConstraint && kind == NodeKind::RequiredCapability) {
    if (value.type() != AttrValue::Type::TextSet) {
      throw Error(ErrorCode::InvalidAttr, "constraint attribute must be a set of texts");
    }
    for (const auto& c : value.as_set()) parse_constraint(c);
  }
  if (name == kAttrDuration &&
      (kind == NodeKind::ProcessClass || kind == NodeKind::ProcessStepInstance)) {
    if (!value.is_number() || value.as_number().value < 1 ||
        std::floor(value.as_number().value) != value.as_number().value) {
      throw Error(ErrorCode::InvalidAttr, "duration_s must be a positive integer");
    }
  }
  if (name == kAttrCapabilityKind &&
      (kind == NodeKind::RequiredCapability || kind == NodeKind::ProvidedCapability) &&
      value.type() != AttrValue::Type::IriRef) {
    throw Error(ErrorCode::InvalidAttr, "capability_kind must be an IRI");
  }
}

namespace {

bool affects_eligibility(NodeKind kind) {
  return kind == NodeKind::Resource || kind == NodeKind::ProvidedCapability ||
         kind == NodeKind::RequiredCapability;
}

bool affects_eligibility(EdgeKind kind) {
  return kind == EdgeKind::providesCapability ||
         kind == EdgeKind::requiresCapability || kind == EdgeKind::instanceOf;
}

}  // namespace

std::span<const std::pair<NodeKind, NodeKind>> permitted_pairs(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::hasInput:
    case EdgeKind::hasOutput: return kIoPairs;
    case EdgeKind::hasSuccessor: return kSuccessorPairs;
    case EdgeKind::requiresCapability: return kRequiresPairs;
    case EdgeKind::providesCapability: return kProvidesPairs;
    case EdgeKind::hasUndesiredCondition: return kHasConditionPairs;
    case EdgeKind::hasPlausibleCause: return kCausePairs;
    case EdgeKind::definesCause: return kDefinesPairs;
    case EdgeKind::affects: return kAffectsPairs;
    case EdgeKind::instanceOf: return kInstancePairs;
    case EdgeKind::allocatedTo: return kAllocatedPairs;
  }
  return {};
}

bool edge_permitted(NodeKind subject, EdgeKind kind, NodeKind object) {
  auto pairs = permitted_pairs(kind);
  return std::find(pairs.begin(), pairs.end(), Pair{subject, object}) != pairs.end();
}

// ---------------------------------------------------------------------------
// AttrValue

namespace {
const std::regex& numeric_re() {
  static const std::regex re(
      R"([+-]?([0-9]+|[0-9]*\.[0-9]+|([0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)[eE][+-]?[0-9]+))");
  return re;
}
}  // namespace

AttrValue AttrValue::number(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::InvalidAttr, "number must be finite");
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  std::string lexical(buf, res.ptr);
  return AttrValue(Number{value, std::move(lexical)});
}

AttrValue AttrValue::number_lexical(std::string_view lexical) {
  std::string text(lexical);
  if (!std::regex_match(text, numeric_re())) {
    throw Error(ErrorCode::InvalidAttr, fmt::format("'{}' is not a number", text));
  }
  double value = std::strtod(text.c_str(), nullptr);
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::InvalidAttr, fmt::format("'{}' is out of range", text));
  }
  return AttrValue(Number{value, std::move(text)});
}

bool operator==(const AttrValue& a, const AttrValue& b) {
  if (a.v_.index() != b.v_.index()) return false;
  switch (a.type()) {
    case AttrValue::Type::Number:
      return a.as_number().lexical == b.as_number().lexical;
    case AttrValue::Type::Text: return a.as_text() == b.as_text();
    case AttrValue::Type::Boolean: return a.as_bool() == b.as_bool();
    case AttrValue::Type::TextSet: return a.as_set() == b.as_set();
    case AttrValue::Type::IriRef: return a.as_iri().iri == b.as_iri().iri;
  }
  return false;
}

std::string AttrValue::to_display() const {
  switch (type()) {
    case Type::Number: return as_number().lexical;
    case Type::Text: return as_text();
    case Type::Boolean: return as_bool() ? "true" : "false";
    case Type::TextSet: return fmt::format("{{{}}}", fmt::join(as_set(), ","));
    case Type::IriRef: return as_iri().iri;
  }
  return {};
}

std::string_view to_string(AttrValue::Type type) {
  switch (type) {
    case AttrValue::Type::Number: return "number";
    case AttrValue::Type::Text: return "text";
    case AttrValue::Type::Boolean: return "boolean";
    case AttrValue::Type::TextSet: return "set";
    case AttrValue::Type::IriRef: return "iri";
  }
  return "?";
}

bool is_valid_attr_name(std::string_view name) {
  // Vocabulary-namespace IRIs are spelled by their local name instead.
  if (name.starts_with(kPprNamespace)) return false;
  if (name == std::string(kRdfNamespace) + "type" || name == std::string(kRdfsNamespace) + "label") {
    return false;
  }
  return is_identifier(name) || looks_absolute(name);
}

// ---------------------------------------------------------------------------
// AkgGraph

const std::map<std::string, std::string>& standard_prefixes() {
  static const std::map<std::string, std::string> table = {
      {"ppr", std::string(kPprNamespace)},
      {"rdf", std::string(kRdfNamespace)},
      {"rdfs", std::string(kRdfsNamespace)},
      {"xsd", std::string(kXsdNamespace)},
  };
  return table;
}

AkgGraph::AkgGraph() : prefixes_(standard_prefixes()) {}

void AkgGraph::touch(bool eligibility) {
  ++version_;
  if (eligibility) ++eligibility_version_;
}

const Node& AkgGraph::add_node(Iri iri, NodeKind kind, std::string label,
                               Attributes attrs) {
  if (iri.empty()) throw Error(ErrorCode::InvalidArgument, "empty IRI");
  if (contains(iri)) {
    throw Error(ErrorCode::DuplicateIri, fmt::format("node {} already exists", iri.value));
  }
  for (const auto& [name, value] : attrs) check_attribute(kind, name, value);
  Node node{iri, kind, std::move(label), std::move(attrs)};
  auto [it, inserted] = nodes_.emplace(std::move(iri), std::move(node));
  touch(affects_eligibility(kind));
  return it->second;
}

const Edge& AkgGraph::add_edge(const Iri& subject, EdgeKind kind,
                               const Iri& object, CycleCheck check) {
  const Node& s = node(subject);
  const Node& o = node(object);
  if (!edge_permitted(s.kind, kind, o.kind)) {
    throw Error(ErrorCode::TypeViolation,
                fmt::format("{} {} {} not permitted ({} -> {})", subject.value,
                            to_string(kind), object.value, to_string(s.kind),
                            to_string(o.kind)));
  }
  Edge edge{subject, kind, object};
  if (auto it = edges_.find(edge); it != edges_.end()) return *it;
  if (kind == EdgeKind::hasSuccessor && check == CycleCheck::Enforce &&
      (subject == object || successor_reachable(object, subject))) {
    throw Error(ErrorCode::CycleIntroduced,
                fmt::format("hasSuccessor {} -> {} closes a cycle", subject.value,
                            object.value));
  }
  auto [it, inserted] = edges_.insert(edge);
  out_[subject].emplace(kind, object);
  in_[object].emplace(kind, subject);
  touch(affects_eligibility(kind));
  return *it;
}

void AkgGraph::remove_edge(const Iri& subject, EdgeKind kind, const Iri& object) {
  auto it = edges_.find(Edge{subject, kind, object});
  if (it == edges_.end()) {
    throw Error(ErrorCode::MissingEdge,
                fmt::format("no edge {} {} {}", subject.value, to_string(kind),
                            object.value));
  }
  edges_.erase(it);
  out_[subject].erase({kind, object});
  in_[object].erase({kind, subject});
  touch(affects_eligibility(kind));
}

void AkgGraph::set_attr(const Iri& iri, const std::string& name, AttrValue value) {
  auto it = nodes_.find(iri);
  if (it == nodes_.end()) {
    throw Error(ErrorCode::UnknownNode, fmt::format("unknown node {}", iri.value));
  }
  check_attribute(it->second.kind, name, value);
  auto& attrs = it->second.attrs;
  if (auto a = attrs.find(name); a != attrs.end() && a->second == value) return;
  attrs[name] = std::move(value);
  touch(affects_eligibility(it->second.kind));
}

void AkgGraph::set_prefix(const std::string& prefix, const std::string& base) {
  if (!prefix.empty() && !is_pn_local(prefix)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("invalid prefix '{}'", prefix));
  }
  if (auto std_it = standard_prefixes().find(prefix);
      std_it != standard_prefixes().end() && std_it->second != base) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("prefix '{}:' is reserved for <{}>", prefix, std_it->second));
  }
  auto& slot = prefixes_[prefix];
  if (slot == base) return;
  slot = base;
  touch(false);
}

const Node* AkgGraph::find(const Iri& iri) const {
  auto it = nodes_.find(iri);
  return it == nodes_.end() ? nullptr : &it->second;
}

const Node& AkgGraph::node(const Iri& iri) const {
  if (const Node* n = find(iri)) return *n;
  throw Error(ErrorCode::UnknownNode, fmt::format("unknown node {}", iri.value));
}

bool AkgGraph::has_edge(const Iri& subject, EdgeKind kind, const Iri& object) const {
  return edges_.count(Edge{subject, kind, object}) != 0;
}

std::vector<Iri> AkgGraph::neighbors(const Iri& iri, EdgeKind kind,
                                     Direction direction) const {
  node(iri);
  const auto& index = direction == Direction::Out ? out_ : in_;
  std::vector<Iri> result;
  auto it = index.find(iri);
  if (it == index.end()) return result;
  // The adjacency set is ordered by (kind, iri): the kind's slice is sorted.
  auto lo = it->second.lower_bound({kind, Iri{}});
  for (; lo != it->second.end() && lo->first == kind; ++lo) {
    result.push_back(lo->second);
  }
  return result;
}

std::vector<Iri> AkgGraph::nodes_of_kind(NodeKind kind) const {
  std::vector<Iri> result;
  for (const auto& [iri, n] : nodes_) {
    if (n.kind == kind) result.push_back(iri);
  }
  return result;
}

Iri AkgGraph::expand(std::string_view name) const {
  if (name.size() >= 2 && name.front() == '<' && name.back() == '>') {
    return Iri{std::string(name.substr(1, name.size() - 2))};
  }
  auto colon = name.find(':');
  if (colon != std::string_view::npos) {
    std::string prefix(name.substr(0, colon));
    if (auto it = prefixes_.find(prefix); it != prefixes_.end()) {
      return Iri{it->second + std::string(name.substr(colon + 1))};
    }
    if (name.substr(colon + 1).starts_with("//") || prefix == "urn") {
      return Iri{std::string(name)};
    }
  }
  throw Error(ErrorCode::InvalidArgument,
              fmt::format("cannot expand '{}': undeclared prefix", name));
}

std::string AkgGraph::compact(const Iri& iri) const {
  const std::string* best_prefix = nullptr;
  std::size_t best_len = 0;
  for (const auto& [prefix, base] : prefixes_) {
    if (base.empty() || base.size() < best_len) continue;
    if (!iri.value.starts_with(base)) continue;
    if (!is_pn_local(std::string_view(iri.value).substr(base.size()))) continue;
    if (base.size() > best_len) {
      best_len = base.size();
      best_prefix = &prefix;
    }
  }
  if (best_prefix) return *best_prefix + ":" + iri.value.substr(best_len);
  return "<" + iri.value + ">";
}

bool AkgGraph::successor_reachable(const Iri& from, const Iri& to) const {
  std::set<Iri> seen;
  std::vector<Iri> stack{from};
  while (!stack.empty()) {
    Iri cur = std::move(stack.back());
    stack.pop_back();
    if (cur == to) return true;
    if (!seen.insert(cur).second) continue;
    for (auto& next : neighbors(cur, EdgeKind::hasSuccessor, Direction::Out)) {
      stack.push_back(std::move(next));
    }
  }
  return false;
}

bool AkgGraph::has_successor_cycle() const {
  // Kahn's algorithm over the hasSuccessor subgraph.
  std::map<Iri, int> indegree;
  for (const auto& e : edges_) {
    if (e.kind != EdgeKind::hasSuccessor) continue;
    indegree.try_emplace(e.subject, 0);
    ++indegree[e.object];
  }
  std::vector<Iri> ready;
  for (const auto& [iri, d] : indegree) {
    if (d == 0) ready.push_back(iri);
  }
  std::size_t removed = 0;
  while (!ready.empty()) {
    Iri cur = std::move(ready.back());
    ready.pop_back();
    ++removed;
    for (const auto& next : neighbors(cur, EdgeKind::hasSuccessor, Direction::Out)) {
      if (--indegree[next] == 0) ready.push_back(next);
    }
  }
  return removed != indegree.size();
}

const ProcessRun* AkgGraph::find_run(const std::string& run_id) const {
  auto it = runs_.find(run_id);
  return it == runs_.end() ? nullptr : &it->second;
}

bool operator==(const AkgGraph& a, const AkgGraph& b) {
  return a.prefixes_ == b.prefixes_ && a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
}

// ---------------------------------------------------------------------------

CauseScope cause_scope(const AkgGraph& graph, const Iri& cause) {
  const Node& n = graph.node(cause);
  if (n.kind != NodeKind::PlausibleCause) {
    throw Error(ErrorCode::KindMismatch,
                fmt::format("{} is a {}, not a PlausibleCause", cause.value,
                            to_string(n.kind)));
  }
  return graph.neighbors(cause, EdgeKind::definesCause, Direction::In).empty()
             ? CauseScope::Global
             : CauseScope::ResourceSpecific;
}

std::vector<Iri> process_definition(const AkgGraph& graph, const Iri& product_class) {
  const Node& product = graph.node(product_class);
  if (product.kind != NodeKind::ProductClass) {
    throw Error(ErrorCode::NotAProductClass,
                fmt::format("{} is a {}, not a ProductClass", product_class.value,
                            to_string(product.kind)));
  }

  // Closure: processes producing the product, the processes producing their
  // inputs, and anything linked to those by hasSuccessor in either direction.
  std::set<Iri> processes;
  std::set<Iri> seen_products;
  std::vector<Iri> product_queue{product_class};
  std::vector<Iri> process_queue;
  auto visit_process = [&](const Iri& p) {
    if (processes.insert(p).second) process_queue.push_back(p);
  };
  while (!product_queue.empty() || !process_queue.empty()) {
    if (!product_queue.empty()) {
      Iri prod = std::move(product_queue.back());
      product_queue.pop_back();
      if (!seen_products.insert(prod).second) continue;
      for (const auto& p : graph.neighbors(prod, EdgeKind::hasOutput, Direction::In)) {
        if (graph.node(p).kind == NodeKind::ProcessClass) visit_process(p);
      }
      continue;
    }
    Iri proc = std::move(process_queue.back());
    process_queue.pop_back();
    for (const auto& in : graph.neighbors(proc, EdgeKind::hasInput, Direction::Out)) {
      product_queue.push_back(in);
    }
    for (const auto& p : graph.neighbors(proc, EdgeKind::hasSuccessor, Direction::Out)) {
      visit_process(p);
    }
    for (const auto& p : graph.neighbors(proc, EdgeKind::hasSuccessor, Direction::In)) {
      visit_process(p);
    }
  }
  if (processes.empty()) {
    throw Error(ErrorCode::EmptyProcessDefinition,
                fmt::format("no process produces {}", product_class.value));
  }

  std::map<Iri, int> indegree;
  for (const auto& p : processes) indegree[p] = 0;
  for (const auto& p : processes) {
    for (const auto& next : graph.neighbors(p, EdgeKind::hasSuccessor, Direction::Out)) {
      ++indegree[next];
    }
  }
  std::priority_queue<Iri, std::vector<Iri>, std::greater<>> ready;
  for (const auto& [p, d] : indegree) {
    if (d == 0) ready.push(p);
  }
  std::vector<Iri> order;
  while (!ready.empty()) {
    Iri cur = ready.top();
    ready.pop();
    order.push_back(cur);
    for (const auto& next : graph.neighbors(cur, EdgeKind::hasSuccessor, Direction::Out)) {
      if (--indegree[next] == 0) ready.push(next);
    }
  }
  if (order.size() != processes.size()) {
    throw Error(ErrorCode::CycleIntroduced,
                fmt::format("process definition of {} contains a hasSuccessor cycle",
                            product_class.value));
  }
  return order;
}

std::vector<ProcessRun> instantiate_run(AkgGraph& graph, const Iri& product_class,
                                        std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "run count must be at least 1");
  const auto definition = process_definition(graph, product_class);
  const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();

  std::vector<ProcessRun> runs;
  for (std::size_t i = 0; i < n; ++i) {
    // Pick the next sequence number whose derived IRIs are all unused.
    std::uint64_t seq = 0;
    for (;;) {
      seq = ++graph.run_seq_;
      auto suffix = fmt::format("__run{}", seq);
      bool clash = graph.contains(Iri{product_class.value + suffix}) ||
                   graph.runs_.count(fmt::format("run-{}", seq)) != 0;
      for (const auto& p : definition) {
        clash = clash || graph.contains(Iri{p.value + suffix});
      }
      if (!clash) break;
    }
    const auto suffix = fmt::format("__run{}", seq);
    ProcessRun run;
    run.run_id = fmt::format("run-{}", seq);
    run.product_class = product_class;
    run.product_instance = Iri{product_class.value + suffix};
    run.created_at = now;

    const Node& product = graph.node(product_class);
    graph.add_node(run.product_instance, NodeKind::ProductInstance,
                   fmt::format("{} ({})", product.label, run.run_id));
    graph.add_edge(run.product_instance, EdgeKind::instanceOf, product_class);
    for (const auto& p : definition) {
      Iri step{p.value + suffix};
      const Node& cls = graph.node(p);
      graph.add_node(step, NodeKind::ProcessStepInstance,
                     fmt::format("{} ({})", cls.label, run.run_id));
      graph.add_edge(step, EdgeKind::instanceOf, p);
      if (graph.has_edge(p, EdgeKind::hasOutput, product_class)) {
        graph.add_edge(step, EdgeKind::hasOutput, run.product_instance);
      }
      run.steps.push_back(std::move(step));
    }
    graph.runs_.emplace(run.run_id, run);
    runs.push_back(std::move(run));
  }
  return runs;
}

AkgGraph class_level_subgraph(const AkgGraph& graph) {
  AkgGraph sub;
  for (const auto& [prefix, base] : graph.prefixes()) sub.set_prefix(prefix, base);
  for (const auto& [iri, n] : graph.nodes()) {
    if (is_class_level(n.kind)) sub.add_node(iri, n.kind, n.label, n.attrs);
  }
  for (const auto& e : graph.edges()) {
    if (sub.contains(e.subject) && sub.contains(e.object)) {
      sub.add_edge(e.subject, e.kind, e.object, CycleCheck::Defer);
    }
  }
  return sub;
}

}  // namespace ppr
