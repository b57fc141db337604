#include "ppr/capability.hpp"

#include <algorithm>
#include <array>
#include <regex>

#include <fmt/format.h>

namespace ppr {

namespace {

constexpr std::array<std::pair<ConstraintOp, std::string_view>, 7> kOps = {{
    {ConstraintOp::eq, "eq"},
    {ConstraintOp::ne, "ne"},
    {ConstraintOp::lt, "lt"},
    {ConstraintOp::le, "le"},
    {ConstraintOp::gt, "gt"},
    {ConstraintOp::ge, "ge"},
    {ConstraintOp::in, "in"},
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_numeric(std::string_view s) {
  static const std::regex re(
      R"([+-]?([0-9]+|[0-9]*\.[0-9]+|([0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)[eE][+-]?[0-9]+))");
  return std::regex_match(s.begin(), s.end(), re);
}

[[noreturn]] void malformed(std::string_view text, std::string_view why) {
  throw Error(ErrorCode::InvalidAttr, fmt::format("malformed constraint '{}': {}", text, why));
}

}  // namespace

std::string_view to_string(ConstraintOp op) {
  for (const auto& [o, name] : kOps) {
    if (o == op) return name;
  }
  return "?";
}

std::optional<ConstraintOp> constraint_op_from_string(std::string_view name) {
  for (const auto& [o, n] : kOps) {
    if (n == name) return o;
  }
  return std::nullopt;
}

bool is_ordering(ConstraintOp op) {
  return op == ConstraintOp::lt || op == ConstraintOp::le || op == ConstraintOp::gt ||
         op == ConstraintOp::ge;
}

Constraint parse_constraint(std::string_view text) {
  std::string_view rest = trim(text);
  auto next_word = [&]() {
    auto end = rest.find_first_of(" \t");
    std::string_view word = rest.substr(0, end);
    rest = end == std::string_view::npos ? std::string_view{} : trim(rest.substr(end));
    return word;
  };
  Constraint c;
  c.attribute = std::string(next_word());
  if (c.attribute.empty() || !is_valid_attr_name(c.attribute)) {
    malformed(text, "bad attribute name");
  }
  auto op = constraint_op_from_string(next_word());
  if (!op) malformed(text, "unknown operator");
  c.op = *op;
  if (rest.empty()) malformed(text, "missing value");

  if (rest.front() == '{') {
    if (rest.back() != '}') malformed(text, "unterminated set");
    AttrValue::TextSet members;
    std::string_view body = rest.substr(1, rest.size() - 2);
    while (!trim(body).empty()) {
      auto comma = body.find(',');
      auto item = trim(body.substr(0, comma));
      if (item.empty()) malformed(text, "empty set member");
      members.emplace(item);
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
    c.value = AttrValue::set(std::move(members));
  } else if (rest == "true" || rest == "false") {
    c.value = AttrValue::boolean(rest == "true");
  } else if (is_numeric(rest)) {
    c.value = AttrValue::number_lexical(rest);
  } else if (rest.size() >= 2 && rest.front() == '"' && rest.back() == '"') {
    c.value = AttrValue::text(std::string(rest.substr(1, rest.size() - 2)));
  } else {
    c.value = AttrValue::text(std::string(rest));
  }

  if (c.op == ConstraintOp::in && c.value.type() != AttrValue::Type::TextSet) {
    malformed(text, "'in' needs a {..} set");
  }
  if (c.op != ConstraintOp::in && c.value.type() == AttrValue::Type::TextSet) {
    malformed(text, "sets are only valid with 'in'");
  }
  if (is_ordering(c.op) && !c.value.is_number()) {
    malformed(text, "ordering operators need a number");
  }
  return c;
}

std::string format_constraint(const Constraint& constraint) {
  std::string value;
  const auto& v = constraint.value;
  if (v.type() == AttrValue::Type::Text) {
    const auto& t = v.as_text();
    bool needs_quotes = t.empty() || t == "true" || t == "false" || is_numeric(t) ||
                        t.front() == '{' || t.front() == '"' || trim(t) != t;
    value = needs_quotes ? fmt::format("\"{}\"", t) : t;
  } else if (v.type() == AttrValue::Type::TextSet) {
    value = fmt::format("{{{}}}", fmt::join(v.as_set(), ","));
  } else {
    value = v.to_display();
  }
  return fmt::format("{} {} {}", constraint.attribute, to_string(constraint.op), value);
}

RequiredCapabilitySpec required_spec(const Node& node) {
  RequiredCapabilitySpec spec;
  auto kind = node.attrs.find(std::string(kAttrCapabilityKind));
  spec.capability_kind = kind != node.attrs.end() && kind->second.type() == AttrValue::Type::IriRef
                             ? Iri{kind->second.as_iri().iri}
                             : node.iri;
  if (auto it = node.attrs.find(std::string(kAttrConstraint));
      it != node.attrs.end() && it->second.type() == AttrValue::Type::TextSet) {
    for (const auto& text : it->second.as_set()) {
      spec.constraints.push_back(parse_constraint(text));
    }
  }
  return spec;
}

ProvidedCapabilitySpec provided_spec(const Node& node) {
  ProvidedCapabilitySpec spec;
  auto kind = node.attrs.find(std::string(kAttrCapabilityKind));
  spec.capability_kind = kind != node.attrs.end() && kind->second.type() == AttrValue::Type::IriRef
                             ? Iri{kind->second.as_iri().iri}
                             : node.iri;
  for (const auto& [name, value] : node.attrs) {
    if (name != kAttrCapabilityKind) spec.attributes.emplace(name, value);
  }
  return spec;
}

}  // namespace ppr
