#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ppr/graph.hpp"

namespace ppr {

// Reserved attribute names understood by the engine.
inline constexpr std::string_view kAttrCapabilityKind = "capability_kind";
inline constexpr std::string_view kAttrConstraint = "constraint";
inline constexpr std::string_view kAttrDuration = "duration_s";
inline constexpr std::string_view kAttrStart = "start_s";
inline constexpr std::string_view kAttrWeight = "weight";

enum class ConstraintOp { eq, ne, lt, le, gt, ge, in };

std::string_view to_string(ConstraintOp op);
std::optional<ConstraintOp> constraint_op_from_string(std::string_view name);
bool is_ordering(ConstraintOp op);

/// `attribute op value`, e.g. `torque_nm ge 12` or `tool in {hex,torx}`.
struct Constraint {
  std::string attribute;
  ConstraintOp op = ConstraintOp::eq;
  AttrValue value;

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

/// Parses the textual form. Values are `{a,b}` sets, true/false, numbers, or
/// free text. Throws InvalidAttr on malformed input or when the value type does
/// not suit the operator.
Constraint parse_constraint(std::string_view text);
std::string format_constraint(const Constraint& constraint);

struct RequiredCapabilitySpec {
  Iri capability_kind;
  std::vector<Constraint> constraints;
};

struct ProvidedCapabilitySpec {
  Iri capability_kind;
  Attributes attributes;
};

/// Builds the spec from a RequiredCapability node. A node without
/// `capability_kind` uses its own IRI as the kind.
RequiredCapabilitySpec required_spec(const Node& node);
ProvidedCapabilitySpec provided_spec(const Node& node);

}  // namespace ppr
