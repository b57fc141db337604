#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ppr/graph.hpp"

namespace ppr {

enum class Severity { Error, Warning };
std::string_view to_string(Severity severity);

struct Violation {
  std::string rule_id;  // V1..V8
  Severity severity = Severity::Error;
  Iri subject;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Structural rules checked by validate():
///   V1 error    ProcessClass without requiresCapability
///   V2 error    Resource without providesCapability
///   V3 error    edge from a ProcessClass directly to a Resource
///   V4 warning  UndesiredCondition without hasPlausibleCause
///   V5 error    PlausibleCause scoped by more than one resource
///   V6 error    instance node without exactly one instanceOf
///   V7 error    hasSuccessor cycle (one violation per cycle)
///   V8 warning  constraint on an attribute no ProvidedCapability carries
///
/// Pure and total; the result is sorted by (rule_id, subject, message).
std::vector<Violation> validate(const AkgGraph& graph);

std::size_t count_errors(const std::vector<Violation>& violations);

}  // namespace ppr
