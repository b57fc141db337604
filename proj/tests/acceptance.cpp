// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <sys/wait.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "ppr/diagnosis.hpp"
#include "ppr/matchmaker.hpp"
#include "ppr/validator.hpp"
#include "support/http_fixture.hpp"
#include "support/oracles.hpp"
#include "support/random_graph.hpp"

namespace ppr {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  failures += !o.pass;
  std::cout << fmt::format("{} {:<34} {}\n", o.pass ? "PASS" : "FAIL", name, o.detail) << std::flush;
}

// ---------------------------------------------------------------- criteria

Outcome turtle_round_trip() {
  constexpr int kGraphs = 120;
  std::mt19937_64 rng(1001);
  auto t0 = Clock::now();
  int bad = 0;
  std::size_t max_triples = 0;
  for (int i = 0; i < kGraphs; ++i) {
    AkgGraph g = testing::random_graph(rng, {30, 200});
    max_triples = std::max(max_triples, g.edges().size());
    auto back = ttl::load_turtle(ttl::serialize_turtle(g));
    bad += !back.graph || !(*back.graph == g);
  }
  double secs = seconds_since(t0);
  return {bad == 0 && secs < 10.0,
          fmt::format("{} graphs (max {} edges), {} mismatches, {:.2f} s (limit 10 s)", kGraphs, max_triples, bad,
                      secs)};
}

Outcome matchmaker_oracle() {
  std::mt19937_64 rng(2002);
  int pairs = 0, pair_bad = 0;
  for (; pairs < 1000; ++pairs) {
    RequiredCapabilitySpec req{Iri{testing::coin(rng) ? "K0" : "K1"}, {}};
    std::vector<std::string> texts;
    for (int c = testing::uniform(rng, 0, 3); c > 0; --c) {
      texts.push_back(testing::random_match_constraint(rng));
      req.constraints.push_back(parse_constraint(texts.back()));
    }
    ProvidedCapabilitySpec prov{Iri{testing::coin(rng) ? "K0" : "K1"}, testing::random_match_attributes(rng)};
    std::optional<bool> expected = req.capability_kind == prov.capability_kind;
    if (*expected) {
      for (const auto& t : texts) {
        auto s = oracle::satisfied(t, prov.attributes);
        if (!s) {
          expected.reset();
          break;
        }
        *expected = *expected && *s;
      }
    }
    try {
      bool got = capability_matches(req, prov);
      pair_bad += !expected || got != *expected;
    } catch (const Error& e) {
      pair_bad += expected.has_value() || e.code() != ErrorCode::TypeMismatch;
    }
  }

  int graphs = 300, checks = 0, graph_bad = 0;
  for (int round = 0; round < graphs; ++round) {
    auto m = testing::random_match_graph(rng, 5, 5);
    for (std::size_t i = 0; i < m.processes.size(); ++i) {
      auto expected = oracle::eligible(m.graph, m.processes[i]);
      for (const auto& target : {m.processes[i], m.steps[i]}) {
        ++checks;
        try {
          auto got = eligible_resources(m.graph, target).eligible;
          graph_bad += !expected || got != *expected;
        } catch (const Error& e) {
          graph_bad += expected.has_value() || e.code() != ErrorCode::TypeMismatch;
        }
      }
    }
  }
  return {pair_bad == 0 && graph_bad == 0,
          fmt::format("{} pairs / {} disagreements; {} graphs, {} eligibility checks / {} disagreements", pairs,
                      pair_bad, graphs, checks, graph_bad)};
}

Outcome scheduler_quality() {
  constexpr int kInstances = 250;
  std::mt19937_64 rng(3003);
  auto t0 = Clock::now();
  int infeasible = 0, below_opt = 0, worsened = 0;
  double worst = 1.0, worst_improved = 1.0;
  for (int i = 0; i < kInstances; ++i) {
    auto inst = testing::random_instance(rng, 6, 3);
    auto opt = oracle::optimum_makespan(inst);
    auto base = schedule(inst);
    SchedulePolicy p;
    p.improve = true;
    auto improved = schedule(inst, p);
    for (const auto* s : {&base, &improved}) {
      infeasible += !oracle::schedule_problems(inst, *s).empty();
      below_opt += s->makespan_s < opt;
    }
    worsened += improved.makespan_s > base.makespan_s;
    worst = std::max(worst, double(base.makespan_s) / double(opt));
    worst_improved = std::max(worst_improved, double(improved.makespan_s) / double(opt));
  }
  double secs = seconds_since(t0);
  bool pass = infeasible == 0 && below_opt == 0 && worsened == 0 && worst <= 2.0 && secs < 60.0;
  return {pass, fmt::format("{} instances, infeasible {}, below optimum {}, improve worse {}, max ratio {:.3f} "
                            "(improved {:.3f}, limit 2.0), {:.2f} s (limit 60 s)",
                            kInstances, infeasible, below_opt, worsened, worst, worst_improved, secs)};
}

Outcome diagnosis_oracle() {
  constexpr int kGraphs = 250;
  std::mt19937_64 rng(4004);
  int contexts = 0, bad = 0, nonempty = 0;
  for (int round = 0; round < kGraphs; ++round) {
    auto d = testing::random_diagnosis_graph(rng);
    auto eligible_of = [&](const Iri& cls) { return *oracle::eligible(d.graph, cls); };
    for (int k = 0; k < 4; ++k) {
      auto ctx = testing::random_context(rng, d);
      auto got = plausible_causes(d.graph, ctx).causes;
      auto want = oracle::causes(d.graph, ctx, eligible_of);
      ++contexts;
      nonempty += !want.empty();
      bool same = got.size() == want.size();
      for (std::size_t i = 0; same && i < got.size(); ++i) {
        same = got[i].cause == want[i].cause && got[i].weight == want[i].weight &&
               (got[i].scope == CauseScope::ResourceSpecific) == want[i].scoped;
      }
      bad += !same;
    }
  }
  return {bad == 0 && nonempty > 0,
          fmt::format("{} graphs, {} contexts ({} with causes), {} disagreements in set or order", kGraphs, contexts,
                      nonempty, bad)};
}

Outcome validator_fixtures() {
  struct Seeded {
    const char* file;
    const char* rule;
    const char* subject;
  };
  const Seeded seeded[] = {{"bad_v1.ttl", "V1", "Sort"},      {"bad_v2.ttl", "V2", "Robot3"},
                           {"bad_v3.ttl", "V3", "Unscrew"},   {"bad_v4.ttl", "V4", "Overheat"},
                           {"bad_v5.ttl", "V5", "LowCharge"}, {"bad_v6.ttl", "V6", "Step1"},
                           {"bad_v7.ttl", "V7", "RemoveModule"}, {"bad_v8.ttl", "V8", "NeedScrewdriving"}};
  std::string wrong;
  for (const auto& s : seeded) {
    auto v = validate(testing::load_fixture(s.file));
    if (v.size() != 1 || v[0].rule_id != s.rule || v[0].subject.value != std::string("http://example.org/ev#") + s.subject) {
      wrong += fmt::format(" {}({} found)", s.file, v.size());
    }
  }
  auto clean = validate(testing::load_fixture("demo.ttl")).size();
  return {wrong.empty() && clean == 0,
          fmt::format("8 seeded fixtures{}, clean fixture {} violations", wrong.empty() ? " exact" : ": wrong" + wrong,
                      clean)};
}

struct Proc {
  int status = -1;
  std::string out;
};

Proc run_cli_binary(const std::string& args) {
  Proc p;
  std::string cmd = std::string(PPR_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return p;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, f)) > 0) p.out.append(buf, n);
  int raw = pclose(f);
  p.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return p;
}

Outcome ev_scenario() {
  const std::string demo = std::string(PPR_FIXTURE_DIR) + "/demo.ttl";
  const std::string ev = "http://example.org/ev#";
  auto t0 = Clock::now();
  auto diag = run_cli_binary("diagnose " + demo + " --condition ex:BatteryLate --resource ex:AGV1 --json");
  auto whatif = run_cli_binary("whatif " + demo +
                               " --resource ex:Robot2 --capability ex:Robot2_Screw --action remove --json");
  auto sched = run_cli_binary("schedule " + demo + " --product ex:CellModule -n 3 --json");
  double secs = seconds_since(t0);

  std::vector<std::string> problems;
  if (diag.status != 0 || whatif.status != 0 || sched.status != 0) {
    problems.push_back(fmt::format("exit codes {}/{}/{}", diag.status, whatif.status, sched.status));
  }
  // AGV-scoped cause strictly above the global one.
  auto dj = json::parse(diag.out, nullptr, false);
  int scoped_at = -1, global_at = -1;
  if (dj.is_object()) {
    for (std::size_t i = 0; i < dj["causes"].size(); ++i) {
      const auto& c = dj["causes"][i];
      bool agv = false;
      for (const auto& e : c["evidence"]) agv = agv || e["subject"] == ev + "AGV1";
      if (c["scope"] == "resource-specific" && agv && scoped_at < 0) scoped_at = int(i);
      if (c["scope"] == "global" && global_at < 0) global_at = int(i);
    }
  }
  if (scoped_at < 0 || global_at < 0 || scoped_at > global_at) problems.push_back("diagnose ranking");

  auto wj = json::parse(whatif.out, nullptr, false);
  bool starved = false;
  if (wj.is_object()) {
    for (const auto& i : wj["impacts"]) starved = starved || (i["process"] == ev + "Unscrew" && i["starved"] == true);
  }
  if (!starved) problems.push_back("unscrewing not starved");

  // Rebuild the same instance and check the CLI schedule with the independent verifier.
  auto sj = json::parse(sched.out, nullptr, false);
  AkgGraph g = testing::load_fixture("demo.ttl");
  auto runs = instantiate_run(g, g.expand("ex:CellModule"), 3);
  auto inst = build_instance(g, runs);
  Schedule s;
  if (sj.is_object()) {
    s.makespan_s = sj["makespan_s"].get<std::int64_t>();
    for (const auto& a : sj["assignments"]) {
      s.assignments.push_back({Iri{a["step"].get<std::string>()}, Iri{a["resource"].get<std::string>()},
                               a["start_s"].get<std::int64_t>(), a["duration_s"].get<std::int64_t>()});
    }
  }
  auto fp = oracle::schedule_problems(inst, s);
  if (!sj.is_object() || !fp.empty()) problems.push_back("schedule infeasible");
  if (secs >= 5.0) problems.push_back("too slow");

  std::string detail = fmt::format("diagnose/whatif/schedule via CLI, {:.2f} s (limit 5 s), makespan {} s", secs,
                                   s.makespan_s);
  for (const auto& p : problems) detail += "; " + p;
  return {problems.empty(), detail};
}

Outcome nl_byte_identity() {
  testing::LiveService svc(testing::load_fixture("demo.ttl"));
  auto c = svc.client();
  auto chat = c.Post("/api/chat", R"({"question":"Why did the battery not arrive in time"})", "application/json");
  auto diag = c.Post("/api/diagnose", R"({"condition":"http://example.org/ev#BatteryLate"})", "application/json");
  if (!chat || !diag) return {false, "service unreachable"};
  auto cj = json::parse(chat->body);
  auto dj = json::parse(diag->body);
  bool same_version = cj["graph_version"] == dj["graph_version"];
  bool identical = cj["data"].contains("structured") && cj["data"]["structured"].dump() == dj["data"].dump();
  return {cj["data"]["intent"] == "diagnose" && same_version && identical,
          fmt::format("intent {}, graph_version {}/{}, structured payload {} ({} bytes)",
                      cj["data"]["intent"].dump(), cj["graph_version"].dump(), dj["graph_version"].dump(),
                      identical ? "byte-identical" : "DIFFERENT", dj["data"].dump().size())};
}

// Typing invariants of an exported graph: endpoints exist and every edge is a
// permitted (subject kind, predicate, object kind) combination.
std::size_t typing_violations(const json& graph) {
  std::map<std::string, NodeKind> kinds;
  for (const auto& n : graph["nodes"]) kinds[n["iri"].get<std::string>()] = *node_kind_from_string(n["kind"].get<std::string>());
  std::size_t bad = 0;
  for (const auto& e : graph["edges"]) {
    auto s = kinds.find(e["subject"].get<std::string>());
    auto o = kinds.find(e["object"].get<std::string>());
    auto k = edge_kind_from_string(e["predicate"].get<std::string>());
    if (s == kinds.end() || o == kinds.end() || !k || !edge_permitted(s->second, *k, o->second)) ++bad;
  }
  return bad;
}

Outcome concurrency() {
  double duration = 10.0;
  if (const char* env = std::getenv("PPR_ACCEPT_CONCURRENCY_S")) duration = std::atof(env);
  testing::LiveService svc(testing::load_fixture("demo.ttl"));

  std::atomic<bool> stop{false};
  std::atomic<std::uint64_t> requests{0}, type_bad{0}, order_bad{0}, envelope_bad{0}, transport_bad{0};

  auto check_envelope = [&](const httplib::Result& r, std::uint64_t& last) -> std::optional<json> {
    if (!r) {
      ++transport_bad;
      return std::nullopt;
    }
    ++requests;
    auto j = json::parse(r->body, nullptr, false);
    if (!j.is_object() || j["ok"].get<bool>() != j["errors"].empty() || (r->status == 200) != j["ok"].get<bool>()) {
      ++envelope_bad;
      return std::nullopt;
    }
    auto v = j["graph_version"].get<std::uint64_t>();
    if (v < last) ++order_bad;
    last = v;
    return j;
  };

  std::vector<std::thread> readers;
  for (int t = 0; t < 8; ++t) {
    readers.emplace_back([&, t] {
      auto c = svc.client();
      std::uint64_t last = 0;
      for (int i = 0; !stop; ++i) {
        switch ((i + t) % 4) {
          case 0:
            if (auto j = check_envelope(c.Get("/api/graph"), last)) type_bad += typing_violations((*j)["data"]);
            break;
          case 1:
            check_envelope(c.Get("/api/processes/ex:Unscrew/eligible"), last);
            break;
          case 2:
            check_envelope(c.Post("/api/chat", R"({"question":"Why did the battery not arrive in time"})",
                                  "application/json"),
                           last);
            break;
          default:
            check_envelope(c.Post("/api/diagnose", R"({"condition":"ex:ScrewStuck","affected_step":"ex:Unscrew"})",
                                  "application/json"),
                           last);
        }
      }
    });
  }

  // Single writer: capability toggles, plus now and then a run that is
  // scheduled and committed.
  std::uint64_t mutations = 0, writer_bad = 0, last_written = 1;
  {
    auto c = svc.client();
    const std::pair<const char*, const char*> caps[] = {
        {"ex:Robot2", "ex:Robot2_Screw"}, {"ex:Robot1", "ex:Robot1_Grip"}, {"ex:AGV2", "ex:AGV2_Transport"}};
    bool present[3] = {true, true, true};
    auto t0 = Clock::now();
    int runs = 0;
    for (int i = 0; seconds_since(t0) < duration; ++i) {
      int k = i % 3;
      json body{{"capability", caps[k].second}, {"action", present[k] ? "remove" : "add"}};
      auto r = c.Post(fmt::format("/api/resources/{}/capability", caps[k].first), body.dump(), "application/json");
      if (!r || r->status != 200) {
        ++writer_bad;
        continue;
      }
      present[k] = !present[k];
      ++mutations;
      auto v = json::parse(r->body)["graph_version"].get<std::uint64_t>();
      if (v != last_written + 1) ++writer_bad;
      last_written = v;

      if (i % 60 == 59 && runs < 40 && present[0] && present[1]) {
        auto run = c.Post("/api/runs", R"({"product":"ex:CellModule","n":1})", "application/json");
        if (!run || run->status != 200) {
          ++writer_bad;
          continue;
        }
        ++runs;
        ++mutations;
        auto rj = json::parse(run->body);
        last_written = rj["graph_version"].get<std::uint64_t>();
        json sched{{"run_ids", {rj["data"]["runs"][0]["run_id"]}}};
        auto s = c.Post("/api/schedule", sched.dump(), "application/json");
        auto commit = c.Post("/api/schedule/commit", "", "application/json");
        if (!s || s->status != 200 || !commit || commit->status != 200) {
          ++writer_bad;
          continue;
        }
        ++mutations;
        auto v2 = json::parse(commit->body)["graph_version"].get<std::uint64_t>();
        if (v2 != last_written + 1) ++writer_bad;
        last_written = v2;
      }
    }
  }
  stop = true;
  for (auto& t : readers) t.join();

  auto final_graph = svc.engine.export_graph();
  type_bad += typing_violations(final_graph.data);
  bool pass = type_bad == 0 && order_bad == 0 && envelope_bad == 0 && transport_bad == 0 && writer_bad == 0 &&
              final_graph.graph_version == 1 + mutations && mutations > 0;
  return {pass, fmt::format("8 readers + 1 writer for {:.0f} s: {} reads, {} mutations (final version {}), typing "
                            "violations {}, version regressions {}, envelope errors {}, transport errors {}, writer "
                            "errors {}",
                            duration, requests.load(), mutations, final_graph.graph_version, type_bad.load(),
                            order_bad.load(), envelope_bad.load(), transport_bad.load(), writer_bad)};
}

}  // namespace
}  // namespace ppr

int main() {
  using namespace ppr;
  report("turtle round-trip", turtle_round_trip);
  report("matchmaker oracle equivalence", matchmaker_oracle);
  report("scheduler feasibility+quality", scheduler_quality);
  report("diagnosis oracle equivalence", diagnosis_oracle);
  report("validator seeded faults", validator_fixtures);
  report("EV-battery scenario (CLI)", ev_scenario);
  report("NL non-authoritativeness", nl_byte_identity);
  report("concurrency", concurrency);
  std::cout << (failures == 0 ? "ALL PASS\n" : fmt::format("{} criteria FAILED\n", failures));
  return failures == 0 ? 0 : 1;
}
