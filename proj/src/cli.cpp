#include "ppr/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ppr/http.hpp"
#include "ppr/service.hpp"
#include "ppr/turtle.hpp"

namespace ppr {

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownNode:
    case ErrorCode::InvalidArgument:
    case ErrorCode::NotAProductClass:
    case ErrorCode::NotAProcess:
    case ErrorCode::KindMismatch:
    case ErrorCode::MissingEdge:
    case ErrorCode::InstanceTooLarge:
      return kExitUsage;
    case ErrorCode::BackendUnavailable:
      return kExitIo;
    default:
      return kExitDataErrors;
  }
}

namespace {

int status_for(const ApiResponse& r) {
  const std::string& code = r.errors.front().code;
  for (int i = 0; i <= static_cast<int>(ErrorCode::BackendUnavailable); ++i) {
    auto c = static_cast<ErrorCode>(i);
    if (to_string(c) == code) return exit_status(c);
  }
  return kExitDataErrors;
}

struct Loaded {
  std::optional<AkgGraph> graph;
  int status = kExitOk;
};

Loaded load_file(const std::string& path, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "error: cannot read " << path << "\n";
    return {std::nullopt, kExitIo};
  }
  std::stringstream ss;
  ss << in.rdbuf();
  // Cycles are kept so that `validate` can report them; operations needing a
  // DAG fail on their own.
  auto result = ttl::load_turtle(ss.str(), CycleCheck::Defer);
  if (!result.graph) {
    for (const auto& e : result.errors) err << path << ":" << ttl::format_error(e) << "\n";
    return {std::nullopt, kExitIo};
  }
  return {std::move(result.graph), kExitOk};
}

std::string compact(const AkgGraph& g, const json& iri) { return g.compact(Iri{iri.get<std::string>()}); }

std::string iri_list(const AkgGraph& g, const json& list) {
  if (list.empty()) return "(none)";
  std::string out;
  for (const auto& i : list) out += (out.empty() ? "" : ", ") + compact(g, i);
  return out;
}

void print_validate(const AkgGraph& g, const json& d, std::ostream& out) {
  for (const auto& v : d["violations"]) {
    out << fmt::format("{} {} {}: {}\n", v["rule_id"].get<std::string>(), v["severity"].get<std::string>(),
                       compact(g, v["subject"]), v["message"].get<std::string>());
  }
  std::size_t n = d["violations"].size();
  if (n == 0) {
    out << "0 violations\n";
  } else {
    out << fmt::format("{} violation{} ({} error(s), {} warning(s))\n", n, n == 1 ? "" : "s",
                       d["error_count"].get<std::size_t>(), d["warning_count"].get<std::size_t>());
  }
}

void print_match(const AkgGraph& g, const json& d, std::ostream& out) {
  out << fmt::format("{} (class {}): eligible {}\n", compact(g, d["step"]), compact(g, d["process_class"]),
                     iri_list(g, d["eligible"]));
  for (const auto& ex : d["explanations"]) {
    out << fmt::format("  {} {}\n", compact(g, ex["resource"]), ex["eligible"].get<bool>() ? "eligible" : "not eligible");
    for (const auto& req : ex["requirements"]) {
      if (req["satisfied"].get<bool>()) continue;
      out << fmt::format("    unmet {}\n", compact(g, req["requirement"]));
      for (const auto& cand : req["candidates"]) {
        if (!cand["kind_matches"].get<bool>()) continue;
        for (const auto& chk : cand["checks"]) {
          if (chk["satisfied"].get<bool>()) continue;
          const auto& w = chk["witness"];
          std::string have = w.is_null()         ? "missing"
                             : w.contains("lexical") ? w["lexical"].get<std::string>()
                                                     : w["value"].dump();
          out << fmt::format("      {}: {} (has {})\n", compact(g, cand["capability"]),
                             chk["constraint"].get<std::string>(), have);
        }
      }
    }
  }
}

void print_schedule(const AkgGraph& g, const json& d, std::ostream& out) {
  out << fmt::format("{:<40} {:<16} {:>8} {:>8}\n", "step", "resource", "start_s", "end_s");
  for (const auto& a : d["assignments"]) {
    auto start = a["start_s"].get<std::int64_t>();
    out << fmt::format("{:<40} {:<16} {:>8} {:>8}\n", compact(g, a["step"]), compact(g, a["resource"]), start,
                       start + a["duration_s"].get<std::int64_t>());
  }
  out << fmt::format("makespan {} s\n", d["makespan_s"].get<std::int64_t>());
}

void print_diagnosis(const AkgGraph& g, const json& d, std::ostream& out) {
  const auto& causes = d["causes"];
  out << fmt::format("{}: {} plausible cause(s)\n", compact(g, d["context"]["condition"]), causes.size());
  int rank = 0;
  for (const auto& c : causes) {
    std::string scope = c["scope"].get<std::string>();
    if (c["evidence"].size() > 1) {
      std::string owners;
      for (std::size_t k = 1; k < c["evidence"].size(); ++k) {
        owners += (owners.empty() ? "" : ", ") + compact(g, c["evidence"][k]["subject"]);
      }
      scope += " (" + owners + ")";
    }
    out << fmt::format("  {}. {:<24} {:.2f}  {}  {}\n", ++rank, compact(g, c["cause"]), c["weight"].get<double>(),
                       scope, c["label"].get<std::string>());
  }
}

void print_impact(const AkgGraph& g, const json& d, std::ostream& out) {
  out << fmt::format("{} {} on {}\n", d["action"].get<std::string>(), compact(g, d["capability"]),
                     compact(g, d["resource"]));
  if (d["impacts"].empty()) out << "  no eligibility changes\n";
  for (const auto& i : d["impacts"]) {
    out << fmt::format("  {}: {} -> {}{}\n", compact(g, i["process"]), iri_list(g, i["before"]),
                       iri_list(g, i["after"]), i["starved"].get<bool>() ? "  STARVED" : "");
  }
}

// Shared tail of every engine-backed subcommand.
template <typename Print>
int emit(const ApiResponse& r, const AkgGraph& g, bool as_json, Print print, std::ostream& out,
         std::ostream& err) {
  if (!r.ok()) {
    for (const auto& e : r.errors) err << "error: " << e.code << ": " << e.message << "\n";
    return status_for(r);
  }
  if (as_json) {
    out << r.data.dump() << "\n";
  } else {
    print(g, r.data, out);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Product-process-resource asset knowledge graph tool", "ppr"};
  app.require_subcommand(1);

  std::string file;
  std::string step, product, condition, resource, capability, action, output, addr;
  std::size_t n = 1;
  bool improve = false;
  bool as_json = false;

  auto add_file = [&](CLI::App* sub) {
    sub->add_option("file", file, "Turtle model")->required();
    sub->add_flag("--json", as_json, "Print the service JSON payload");
  };

  auto* validate = app.add_subcommand("validate", "Check the model against the validation rules");
  add_file(validate);

  auto* match = app.add_subcommand("match", "Eligible resources for a process step");
  add_file(match);
  match->add_option("--step", step, "ProcessClass or ProcessStepInstance IRI")->required();

  auto* sched = app.add_subcommand("schedule", "Schedule n runs of a product");
  add_file(sched);
  sched->add_option("--product", product, "ProductClass IRI")->required();
  sched->add_option("-n", n, "Number of runs")->check(CLI::PositiveNumber);
  sched->add_flag("--improve", improve, "Run local search after list scheduling");

  auto* diag = app.add_subcommand("diagnose", "Rank plausible causes of an undesired condition");
  add_file(diag);
  diag->add_option("--condition", condition, "UndesiredCondition IRI")->required();
  diag->add_option("--resource", resource, "Resource the condition was observed on");
  diag->add_option("--step", step, "Affected process step");

  auto* whatif = app.add_subcommand("whatif", "Add or remove a provided capability and report the impact");
  add_file(whatif);
  whatif->add_option("--resource", resource, "Resource IRI")->required();
  whatif->add_option("--capability", capability, "ProvidedCapability IRI")->required();
  whatif->add_option("--action", action, "add or remove")->required()->check(CLI::IsMember({"add", "remove"}));
  whatif->add_option("-o,--output", output, "Write the changed model here");

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP/JSON service");
  serve_cmd->add_option("--addr", addr, "host:port (default PPR_ADDR or 127.0.0.1:8080)");

  auto* export_cmd = app.add_subcommand("export", "Rewrite a model in canonical Turtle");
  export_cmd->add_option("file", file, "Turtle model")->required();
  export_cmd->add_option("-o,--output", output, "Output file ('-' for stdout)")->required();

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (serve_cmd->parsed()) return serve(addr);

  auto loaded = load_file(file, err);
  if (!loaded.graph) return loaded.status;

  if (export_cmd->parsed()) {
    std::string text = ttl::serialize_turtle(*loaded.graph);
    if (output == "-") {
      out << text;
      return kExitOk;
    }
    std::ofstream o(output, std::ios::binary);
    if (!(o << text)) {
      err << "error: cannot write " << output << "\n";
      return kExitIo;
    }
    return kExitOk;
  }

  // Ordinary IRIs in arguments may be prefixed names from the file.
  Engine engine(std::move(*loaded.graph));
  const Snapshot before = engine.snapshot();  // keeps the pre-mutation graph alive for printing
  const AkgGraph& g = *before.graph;

  if (validate->parsed()) {
    auto r = engine.validate();
    int status = emit(r, g, as_json, print_validate, out, err);
    if (status == kExitOk && !r.data["violations"].empty()) status = kExitDataErrors;
    return status;
  }
  if (match->parsed()) return emit(engine.eligible(step), g, as_json, print_match, out, err);
  if (sched->parsed()) {
    json body{{"product", product}, {"n", n}, {"policy", {{"improve", improve}}}};
    return emit(engine.schedule(body), g, as_json, print_schedule, out, err);
  }
  if (diag->parsed()) {
    json body{{"condition", condition}};
    if (!resource.empty()) body["observed_on_resource"] = resource;
    if (!step.empty()) body["affected_step"] = step;
    return emit(engine.diagnose(body), g, as_json, print_diagnosis, out, err);
  }
  if (whatif->parsed()) {
    auto r = engine.capability_change(resource, {{"capability", capability}, {"action", action}});
    int status = emit(r, g, as_json, print_impact, out, err);
    if (status == kExitOk && !output.empty()) {
      std::ofstream o(output, std::ios::binary);
      if (!(o << ttl::serialize_turtle(*engine.snapshot().graph))) {
        err << "error: cannot write " << output << "\n";
        return kExitIo;
      }
    }
    return status;
  }
  return kExitUsage;
}

}  // namespace ppr
