#include <fmt/format.h>

#include "ppr/capability.hpp"
#include "ppr/turtle.hpp"

namespace ppr::ttl {

namespace {

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (unsigned char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20 || c == 0x7F) {
          out += fmt::format("\\u{:04X}", c);
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
  return out;
}

std::string predicate_for_attr(const AkgGraph& graph, const std::string& name) {
  if (name.find(':') == std::string::npos) return "ppr:" + name;
  return graph.compact(Iri{name});
}

std::string render_value(const AkgGraph& graph, const std::string& name,
                         const AttrValue& value) {
  switch (value.type()) {
    case AttrValue::Type::Number: return value.as_number().lexical;
    case AttrValue::Type::Text: return quote(value.as_text());
    case AttrValue::Type::Boolean: return value.as_bool() ? "true" : "false";
    case AttrValue::Type::IriRef: return graph.compact(Iri{value.as_iri().iri});
    case AttrValue::Type::TextSet: {
      const auto& members = value.as_set();
      // Constraint lists and multi-valued sets are recognised without a marker;
      // a singleton set needs one so it does not read back as plain text.
      bool marked = members.size() == 1 && name != kAttrConstraint;
      std::string out;
      for (const auto& m : members) {
        if (!out.empty()) out += ", ";
        out += quote(m);
        if (marked) out += "^^ppr:member";
      }
      return out;
    }
  }
  return {};
}

}  // namespace

std::string serialize_turtle(const AkgGraph& graph) {
  std::string out;
  for (const auto& [prefix, base] : graph.prefixes()) {
    out += fmt::format("@prefix {}: <{}> .\n", prefix, base);
  }

  for (const auto& [iri, node] : graph.nodes()) {
    std::vector<std::string> predicates;
    predicates.push_back(fmt::format("a ppr:{}", to_string(node.kind)));
    if (!node.label.empty()) predicates.push_back("rdfs:label " + quote(node.label));
    for (auto kind : kAllEdgeKinds) {
      auto objects = graph.neighbors(iri, kind, Direction::Out);
      if (objects.empty()) continue;
      std::string line = fmt::format("ppr:{} ", to_string(kind));
      for (std::size_t i = 0; i < objects.size(); ++i) {
        if (i) line += ", ";
        line += graph.compact(objects[i]);
      }
      predicates.push_back(std::move(line));
    }
    for (const auto& [name, value] : node.attrs) {
      predicates.push_back(predicate_for_attr(graph, name) + " " +
                           render_value(graph, name, value));
    }

    out += "\n" + graph.compact(iri) + " ";
    for (std::size_t i = 0; i < predicates.size(); ++i) {
      if (i) out += " ;\n    ";
      out += predicates[i];
    }
    out += " .\n";
  }
  return out;
}

}  // namespace ppr::ttl
