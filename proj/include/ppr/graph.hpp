#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ppr/error.hpp"

namespace ppr {

/// Expanded IRI of a node. Prefixed names are expanded before they reach this
/// type, so two Iris are the same node iff their strings are equal.
struct Iri {
  std::string value;

  Iri() = default;
  explicit Iri(std::string v) : value(std::move(v)) {}

  bool empty() const noexcept { return value.empty(); }
  friend auto operator<=>(const Iri&, const Iri&) = default;
  friend bool operator==(const Iri&, const Iri&) = default;
};

enum class NodeKind {
  ProductClass,
  ProcessClass,
  RequiredCapability,
  ProvidedCapability,
  Resource,
  UndesiredCondition,
  PlausibleCause,
  ProductInstance,
  ProcessStepInstance,
};

inline constexpr std::array kAllNodeKinds = {
    NodeKind::ProductClass,       NodeKind::ProcessClass,
    NodeKind::RequiredCapability, NodeKind::ProvidedCapability,
    NodeKind::Resource,           NodeKind::UndesiredCondition,
    NodeKind::PlausibleCause,     NodeKind::ProductInstance,
    NodeKind::ProcessStepInstance,
};

// Declaration order is the canonical predicate order used by the serializer.
enum class EdgeKind {
  hasInput,
  hasOutput,
  hasSuccessor,
  requiresCapability,
  providesCapability,
  hasUndesiredCondition,
  hasPlausibleCause,
  definesCause,
  affects,
  instanceOf,
  allocatedTo,
};

inline constexpr std::array kAllEdgeKinds = {
    EdgeKind::hasInput,           EdgeKind::hasOutput,
    EdgeKind::hasSuccessor,       EdgeKind::requiresCapability,
    EdgeKind::providesCapability, EdgeKind::hasUndesiredCondition,
    EdgeKind::hasPlausibleCause,  EdgeKind::definesCause,
    EdgeKind::affects,            EdgeKind::instanceOf,
    EdgeKind::allocatedTo,
};

std::string_view to_string(NodeKind kind);
std::string_view to_string(EdgeKind kind);
std::optional<NodeKind> node_kind_from_string(std::string_view name);
std::optional<EdgeKind> edge_kind_from_string(std::string_view name);

/// Class-level kinds are templates (products, processes, requirements); the
/// remaining kinds describe concrete individuals.
bool is_class_level(NodeKind kind);
bool is_instance_node(NodeKind kind);  // ProductInstance / ProcessStepInstance

/// Typing table: (subject kind, object kind) pairs allowed for an edge kind.
std::span<const std::pair<NodeKind, NodeKind>> permitted_pairs(EdgeKind kind);
bool edge_permitted(NodeKind subject, EdgeKind kind, NodeKind object);

class AttrValue {
 public:
  struct Number {
    double value = 0;
    std::string lexical;  // exact source text, kept for byte-stable output
  };
  struct IriRef {
    std::string iri;
  };
  using TextSet = std::set<std::string>;

  enum class Type { Number, Text, Boolean, TextSet, IriRef };

  AttrValue() : v_(std::string{}) {}

  static AttrValue number(double value);
  /// Throws InvalidAttr unless `lexical` is a Turtle integer/decimal/double.
  static AttrValue number_lexical(std::string_view lexical);
  static AttrValue text(std::string value) { return AttrValue(std::move(value)); }
  static AttrValue boolean(bool value) { return AttrValue(value); }
  static AttrValue set(TextSet values) { return AttrValue(std::move(values)); }
  static AttrValue iri(std::string value) { return AttrValue(IriRef{std::move(value)}); }

  Type type() const noexcept { return static_cast<Type>(v_.index()); }
  bool is_number() const noexcept { return type() == Type::Number; }

  const Number& as_number() const { return std::get<Number>(v_); }
  const std::string& as_text() const { return std::get<std::string>(v_); }
  bool as_bool() const { return std::get<bool>(v_); }
  const TextSet& as_set() const { return std::get<TextSet>(v_); }
  const IriRef& as_iri() const { return std::get<IriRef>(v_); }

  /// Human-readable rendering (numbers by lexical form, sets as {a,b}).
  std::string to_display() const;

  friend bool operator==(const AttrValue& a, const AttrValue& b);

 private:
  using Storage = std::variant<Number, std::string, bool, TextSet, IriRef>;
  template <typename T>
  explicit AttrValue(T value) : v_(std::move(value)) {}
  Storage v_;
};

std::string_view to_string(AttrValue::Type type);

using Attributes = std::map<std::string, AttrValue>;

/// Attribute names are either plain identifiers (`payload_kg`) living in the
/// vocabulary namespace, or absolute IRIs.
bool is_valid_attr_name(std::string_view name);

/// Throws InvalidAttr when `value` is not acceptable for attribute `name` on a
/// node of `kind` (bad name, empty set, malformed constraint, bad duration).
void check_attribute(NodeKind kind, const std::string& name, const AttrValue& value);

struct Node {
  Iri iri;
  NodeKind kind{};
  std::string label;
  Attributes attrs;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
  Iri subject;
  EdgeKind kind{};
  Iri object;

  friend auto operator<=>(const Edge&, const Edge&) = default;
  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class Direction { Out, In };

// Bulk loaders may defer the hasSuccessor acyclicity check to the validator so
// that a broken model can still be loaded and reported on.
enum class CycleCheck { Enforce, Defer };

/// Instance-level expansion of a product's process definition for one run.
struct ProcessRun {
  std::string run_id;
  Iri product_class;
  Iri product_instance;
  std::vector<Iri> steps;  // topological order
  std::int64_t created_at = 0;
};

inline constexpr std::string_view kPprNamespace = "http://ppr-akg.org/ns#";
inline constexpr std::string_view kRdfNamespace = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfsNamespace = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kXsdNamespace = "http://www.w3.org/2001/XMLSchema#";

/// Prefix table every graph starts with.
const std::map<std::string, std::string>& standard_prefixes();

class AkgGraph {
 public:
  AkgGraph();

  const Node& add_node(Iri iri, NodeKind kind, std::string label,
                       Attributes attrs = {});
  const Edge& add_edge(const Iri& subject, EdgeKind kind, const Iri& object,
                       CycleCheck check = CycleCheck::Enforce);
  /// Throws MissingEdge when the edge is absent.
  void remove_edge(const Iri& subject, EdgeKind kind, const Iri& object);
  void set_attr(const Iri& iri, const std::string& name, AttrValue value);
  void set_prefix(const std::string& prefix, const std::string& base);

  bool contains(const Iri& iri) const { return nodes_.count(iri) != 0; }
  const Node* find(const Iri& iri) const;
  /// Throws UnknownNode.
  const Node& node(const Iri& iri) const;
  bool has_edge(const Iri& subject, EdgeKind kind, const Iri& object) const;

  /// Sorted lexicographically by IRI. Throws UnknownNode.
  std::vector<Iri> neighbors(const Iri& iri, EdgeKind kind,
                             Direction direction) const;
  std::vector<Iri> nodes_of_kind(NodeKind kind) const;

  const std::map<Iri, Node>& nodes() const noexcept { return nodes_; }
  const std::set<Edge>& edges() const noexcept { return edges_; }
  const std::map<std::string, std::string>& prefixes() const noexcept {
    return prefixes_;
  }

  /// Expands `prefix:local`, `<iri>` or an absolute IRI. Throws InvalidArgument
  /// for an undeclared prefix.
  Iri expand(std::string_view name) const;
  /// Shortest prefixed form when the local part is a plain name, else `<iri>`.
  std::string compact(const Iri& iri) const;

  bool has_successor_cycle() const;

  /// Bumped by every mutation.
  std::uint64_t version() const noexcept { return version_; }
  /// Bumped only by mutations that can change matchmaking results.
  std::uint64_t eligibility_version() const noexcept {
    return eligibility_version_;
  }

  const std::map<std::string, ProcessRun>& runs() const noexcept { return runs_; }
  const ProcessRun* find_run(const std::string& run_id) const;

  /// Content equality: prefixes, nodes and edges. Versions and runs ignored.
  friend bool operator==(const AkgGraph& a, const AkgGraph& b);

 private:
  friend std::vector<ProcessRun> instantiate_run(AkgGraph&, const Iri&,
                                                 std::size_t);
  bool successor_reachable(const Iri& from, const Iri& to) const;
  void touch(bool affects_eligibility);

  std::map<std::string, std::string> prefixes_;
  std::map<Iri, Node> nodes_;
  std::set<Edge> edges_;
  std::map<Iri, std::set<std::pair<EdgeKind, Iri>>> out_;
  std::map<Iri, std::set<std::pair<EdgeKind, Iri>>> in_;
  std::map<std::string, ProcessRun> runs_;
  std::uint64_t run_seq_ = 0;
  std::uint64_t version_ = 0;
  std::uint64_t eligibility_version_ = 0;
};

enum class CauseScope { Global, ResourceSpecific };
std::string_view to_string(CauseScope scope);

/// Resource-specific iff some resource defines the cause. Throws UnknownNode,
/// KindMismatch when `cause` is not a PlausibleCause.
CauseScope cause_scope(const AkgGraph& graph, const Iri& cause);

/// Process classes making up a product's definition, in topological order of
/// hasSuccessor (ties broken by IRI). Throws NotAProductClass,
/// EmptyProcessDefinition, CycleIntroduced.
std::vector<Iri> process_definition(const AkgGraph& graph,
                                    const Iri& product_class);

/// Creates `n` runs of the product's process definition. Class-level nodes and
/// edges are left untouched.
std::vector<ProcessRun> instantiate_run(AkgGraph& graph, const Iri& product_class,
                                        std::size_t n);

/// Copy restricted to class-level nodes and the edges between them.
AkgGraph class_level_subgraph(const AkgGraph& graph);

}  // namespace ppr
