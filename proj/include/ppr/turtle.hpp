#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ppr/graph.hpp"

// Turtle subset used as the on-disk exchange format: @prefix/PREFIX
// directives, `a`, predicate lists (;), object lists (,), IRIs, prefixed names
// and plain/typed literals. No blank nodes, collections or relative IRIs.
//
// Vocabulary (normative, see docs/vocabulary.md):
//   ppr:<NodeKind>   class IRIs used with `a`
//   ppr:<EdgeKind>   edge predicates
//   rdfs:label       node label
//   ppr:<name>       attribute `name`; any other predicate IRI is an attribute
//                    named by its full IRI
namespace ppr::ttl {

struct SourcePos {
  int line = 1;
  int column = 1;

  friend auto operator<=>(const SourcePos&, const SourcePos&) = default;
};

struct ParseError {
  int line = 1;
  int column = 1;
  std::string message;
  std::string snippet;
};

std::string format_error(const ParseError& error);

struct NodeDecl {
  Iri iri;
  NodeKind kind{};
  std::string label;
  Attributes attrs;
  SourcePos pos;
};

struct EdgeDecl {
  Edge edge;
  SourcePos pos;
};

/// Result of parsing: everything needed to populate an empty graph.
struct GraphDelta {
  std::vector<std::pair<std::string, std::string>> prefixes;
  std::vector<NodeDecl> nodes;  // sorted by IRI
  std::vector<EdgeDecl> edges;  // sorted by (subject, kind, object)
};

struct ParseResult {
  GraphDelta delta;
  std::vector<ParseError> errors;

  bool ok() const noexcept { return errors.empty(); }
};

ParseResult parse_turtle(std::string_view text);

/// Adds the delta's prefixes, nodes and edges. Throws ppr::Error.
void apply_delta(AkgGraph& graph, const GraphDelta& delta,
                 CycleCheck check = CycleCheck::Enforce);

struct LoadResult {
  std::optional<AkgGraph> graph;
  std::vector<ParseError> errors;
};

/// parse_turtle + apply_delta onto a fresh graph; graph errors (e.g. a
/// hasSuccessor cycle under CycleCheck::Enforce) are reported as ParseErrors.
LoadResult load_turtle(std::string_view text, CycleCheck check = CycleCheck::Enforce);

/// Deterministic canonical form: prefixes sorted, subjects sorted by expanded
/// IRI, edge predicates in EdgeKind order, attributes sorted by name.
std::string serialize_turtle(const AkgGraph& graph);

}  // namespace ppr::ttl
