#include "ppr/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>

#include <fmt/format.h>

#include "ppr/capability.hpp"
#include "ppr/matchmaker.hpp"

namespace ppr {

const Assignment* Schedule::find(const Iri& step) const {
  auto it = std::lower_bound(assignments.begin(), assignments.end(), step,
                             [](const Assignment& a, const Iri& s) { return a.step < s; });
  return it != assignments.end() && it->step == step ? &*it : nullptr;
}

namespace {

[[noreturn]] void invalid(std::string message) {
  throw Error(ErrorCode::InvalidInstance, std::move(message));
}

// Index-based view of an instance. Resource indices follow the sorted
// resource list, so comparing indices is comparing IRIs.
struct Problem {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<std::int64_t> duration;
  std::vector<std::vector<std::size_t>> eligible;
  std::vector<std::vector<std::size_t>> preds;
  std::vector<std::vector<std::size_t>> succs;

  explicit Problem(const SchedulingInstance& inst) : n(inst.steps.size()), m(inst.resources.size()) {
    std::map<Iri, std::size_t> step_index;
    std::map<Iri, std::size_t> res_index;
    for (std::size_t i = 0; i < n; ++i) step_index[inst.steps[i].step] = i;
    for (std::size_t r = 0; r < m; ++r) res_index[inst.resources[r]] = r;
    duration.resize(n);
    eligible.resize(n);
    preds.resize(n);
    succs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& s = inst.steps[i];
      duration[i] = s.duration_s;
      for (const auto& r : s.eligible) eligible[i].push_back(res_index.at(r));
      std::sort(eligible[i].begin(), eligible[i].end());
      for (const auto& p : s.predecessors) {
        preds[i].push_back(step_index.at(p));
        succs[step_index.at(p)].push_back(i);
      }
    }
  }
};

struct Timetable {
  std::vector<std::size_t> resource;
  std::vector<std::int64_t> start;
  std::int64_t makespan = 0;
};

Schedule to_schedule(const SchedulingInstance& inst, const Problem& pb, const Timetable& tt) {
  Schedule out;
  out.eligibility_token = inst.eligibility_token;
  for (std::size_t i = 0; i < pb.n; ++i) {
    out.assignments.push_back(
        {inst.steps[i].step, inst.resources[tt.resource[i]], tt.start[i], pb.duration[i]});
    out.makespan_s = std::max(out.makespan_s, tt.start[i] + pb.duration[i]);
  }
  return out;
}

Timetable list_schedule(const Problem& pb) {
  Timetable tt;
  tt.resource.assign(pb.n, 0);
  tt.start.assign(pb.n, 0);
  std::vector<std::int64_t> finish(pb.n, 0);
  std::vector<bool> done(pb.n, false);
  std::vector<std::int64_t> free_at(pb.m, 0);

  auto pred_ready = [&](std::size_t s) {
    std::int64_t t = 0;
    for (auto p : pb.preds[s]) t = std::max(t, finish[p]);
    return t;
  };

  for (std::size_t placed = 0; placed < pb.n; ++placed) {
    std::optional<std::size_t> pick;
    std::int64_t pick_start = 0;
    for (std::size_t s = 0; s < pb.n; ++s) {
      if (done[s]) continue;
      if (!std::all_of(pb.preds[s].begin(), pb.preds[s].end(), [&](auto p) { return done[p]; })) {
        continue;
      }
      std::int64_t ready = pred_ready(s);
      std::int64_t earliest = std::numeric_limits<std::int64_t>::max();
      for (auto r : pb.eligible[s]) earliest = std::min(earliest, std::max(ready, free_at[r]));
      // (earliest start asc, duration desc, IRI asc); s ascends so ties keep the first.
      if (!pick || earliest < pick_start ||
          (earliest == pick_start && pb.duration[s] > pb.duration[*pick])) {
        pick = s;
        pick_start = earliest;
      }
    }
    const std::size_t s = *pick;
    const std::int64_t ready = pred_ready(s);
    std::size_t best_r = pb.eligible[s].front();
    std::int64_t best_start = std::max(ready, free_at[best_r]);
    for (auto r : pb.eligible[s]) {
      std::int64_t st = std::max(ready, free_at[r]);
      if (st < best_start) {
        best_start = st;
        best_r = r;
      }
    }
    tt.resource[s] = best_r;
    tt.start[s] = best_start;
    finish[s] = best_start + pb.duration[s];
    free_at[best_r] = finish[s];
    done[s] = true;
    tt.makespan = std::max(tt.makespan, finish[s]);
  }
  return tt;
}

// Semi-active timetable for fixed resource sequences; nullopt if the
// sequences contradict precedence.
std::optional<Timetable> evaluate(const Problem& pb, const std::vector<std::vector<std::size_t>>& seq) {
  std::vector<std::size_t> resource_of(pb.n, 0);
  std::vector<std::optional<std::size_t>> seq_prev(pb.n);
  std::vector<std::optional<std::size_t>> seq_next(pb.n);
  for (std::size_t r = 0; r < seq.size(); ++r) {
    for (std::size_t k = 0; k < seq[r].size(); ++k) {
      resource_of[seq[r][k]] = r;
      if (k > 0) seq_prev[seq[r][k]] = seq[r][k - 1];
      if (k + 1 < seq[r].size()) seq_next[seq[r][k]] = seq[r][k + 1];
    }
  }
  std::vector<int> indegree(pb.n, 0);
  for (std::size_t s = 0; s < pb.n; ++s) {
    indegree[s] = static_cast<int>(pb.preds[s].size()) + (seq_prev[s] ? 1 : 0);
  }
  std::vector<std::size_t> ready;
  for (std::size_t s = 0; s < pb.n; ++s) {
    if (indegree[s] == 0) ready.push_back(s);
  }
  Timetable tt;
  tt.resource = resource_of;
  tt.start.assign(pb.n, 0);
  std::vector<std::int64_t> finish(pb.n, 0);
  std::size_t count = 0;
  while (!ready.empty()) {
    std::size_t s = ready.back();
    ready.pop_back();
    ++count;
    std::int64_t st = 0;
    for (auto p : pb.preds[s]) st = std::max(st, finish[p]);
    if (seq_prev[s]) st = std::max(st, finish[*seq_prev[s]]);
    tt.start[s] = st;
    finish[s] = st + pb.duration[s];
    tt.makespan = std::max(tt.makespan, finish[s]);
    for (auto q : pb.succs[s]) {
      if (--indegree[q] == 0) ready.push_back(q);
    }
    if (seq_next[s] && --indegree[*seq_next[s]] == 0) ready.push_back(*seq_next[s]);
  }
  if (count != pb.n) return std::nullopt;
  return tt;
}

Timetable local_search(const Problem& pb, Timetable current, std::size_t max_iterations) {
  std::vector<std::vector<std::size_t>> seq(pb.m);
  {
    std::vector<std::size_t> order(pb.n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
      return std::tie(current.start[a], a) < std::tie(current.start[b], b);
    });
    for (auto s : order) seq[current.resource[s]].push_back(s);
  }

  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    std::optional<std::vector<std::vector<std::size_t>>> best_seq;
    std::int64_t best_ms = current.makespan;
    auto consider = [&](std::vector<std::vector<std::size_t>>& candidate) {
      auto tt = evaluate(pb, candidate);
      if (tt && tt->makespan < best_ms) {
        best_ms = tt->makespan;
        best_seq = candidate;
      }
    };

    // Single-step reassignment to another eligible resource, every position.
    for (std::size_t s = 0; s < pb.n; ++s) {
      const std::size_t from = current.resource[s];
      for (auto to : pb.eligible[s]) {
        if (to == from) continue;
        auto base = seq;
        auto& src = base[from];
        src.erase(std::find(src.begin(), src.end(), s));
        for (std::size_t pos = 0; pos <= base[to].size(); ++pos) {
          auto candidate = base;
          candidate[to].insert(candidate[to].begin() + static_cast<std::ptrdiff_t>(pos), s);
          consider(candidate);
        }
      }
    }
    // Pairwise swaps within one resource's sequence.
    for (std::size_t r = 0; r < pb.m; ++r) {
      for (std::size_t i = 0; i < seq[r].size(); ++i) {
        for (std::size_t j = i + 1; j < seq[r].size(); ++j) {
          auto candidate = seq;
          std::swap(candidate[r][i], candidate[r][j]);
          consider(candidate);
        }
      }
    }

    if (!best_seq) break;
    seq = std::move(*best_seq);
    current = *evaluate(pb, seq);
  }
  return current;
}

}  // namespace

void check_instance(const SchedulingInstance& inst) {
  if (!std::is_sorted(inst.resources.begin(), inst.resources.end()) ||
      std::adjacent_find(inst.resources.begin(), inst.resources.end()) != inst.resources.end()) {
    invalid("resources must be sorted and unique");
  }
  std::set<Iri> steps;
  for (const auto& s : inst.steps) {
    if (!steps.insert(s.step).second) invalid(fmt::format("duplicate step {}", s.step.value));
  }
  if (!std::is_sorted(inst.steps.begin(), inst.steps.end(),
                      [](const auto& a, const auto& b) { return a.step < b.step; })) {
    invalid("steps must be sorted by IRI");
  }
  for (const auto& s : inst.steps) {
    if (s.duration_s < 1) invalid(fmt::format("step {} has duration < 1", s.step.value));
    if (s.eligible.empty()) invalid(fmt::format("step {} has no eligible resource", s.step.value));
    for (const auto& r : s.eligible) {
      if (!std::binary_search(inst.resources.begin(), inst.resources.end(), r)) {
        invalid(fmt::format("step {} lists unknown resource {}", s.step.value, r.value));
      }
    }
    for (const auto& p : s.predecessors) {
      if (!steps.count(p)) {
        invalid(fmt::format("step {} has unknown predecessor {}", s.step.value, p.value));
      }
    }
  }
  Problem pb(inst);
  std::vector<int> indegree(pb.n);
  std::vector<std::size_t> ready;
  for (std::size_t s = 0; s < pb.n; ++s) {
    indegree[s] = static_cast<int>(pb.preds[s].size());
    if (indegree[s] == 0) ready.push_back(s);
  }
  std::size_t seen = 0;
  while (!ready.empty()) {
    auto s = ready.back();
    ready.pop_back();
    ++seen;
    for (auto q : pb.succs[s]) {
      if (--indegree[q] == 0) ready.push_back(q);
    }
  }
  if (seen != pb.n) invalid("precedence relation is cyclic");
}

SchedulingInstance build_instance(const AkgGraph& graph, std::span<const ProcessRun> runs) {
  SchedulingInstance inst;
  inst.eligibility_token = graph.eligibility_version();
  inst.resources = graph.nodes_of_kind(NodeKind::Resource);

  std::set<std::string> seen_runs;
  for (const auto& run : runs) {
    if (!seen_runs.insert(run.run_id).second) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("run {} listed twice", run.run_id));
    }
    std::map<Iri, Iri> step_of_class;
    for (const auto& step : run.steps) {
      if (graph.node(step).kind != NodeKind::ProcessStepInstance) {
        throw Error(ErrorCode::KindMismatch,
                    fmt::format("{} is not a ProcessStepInstance", step.value));
      }
      auto classes = graph.neighbors(step, EdgeKind::instanceOf, Direction::Out);
      if (classes.size() != 1) {
        throw Error(ErrorCode::NotAProcess,
                    fmt::format("step {} has no unique process class", step.value));
      }
      step_of_class[classes.front()] = step;
    }
    for (const auto& [cls, step] : step_of_class) {
      SchedulingStep s;
      s.step = step;
      const Node& class_node = graph.node(cls);
      if (auto it = class_node.attrs.find(std::string(kAttrDuration));
          it != class_node.attrs.end() && it->second.is_number()) {
        s.duration_s = static_cast<std::int64_t>(std::llround(it->second.as_number().value));
      }
      s.eligible = eligible_resources(graph, step).eligible;
      if (s.eligible.empty()) {
        throw Error(ErrorCode::StarvedStep,
                    fmt::format("step {} ({}) has no eligible resource", step.value, cls.value));
      }
      for (const auto& pred : graph.neighbors(cls, EdgeKind::hasSuccessor, Direction::In)) {
        if (auto it = step_of_class.find(pred); it != step_of_class.end()) {
          s.predecessors.push_back(it->second);
        }
      }
      std::sort(s.predecessors.begin(), s.predecessors.end());
      inst.steps.push_back(std::move(s));
    }
  }
  std::sort(inst.steps.begin(), inst.steps.end(),
            [](const auto& a, const auto& b) { return a.step < b.step; });
  check_instance(inst);
  return inst;
}

Schedule schedule(const SchedulingInstance& instance, const SchedulePolicy& policy) {
  check_instance(instance);
  Problem pb(instance);
  Timetable tt = list_schedule(pb);
  if (policy.improve) tt = local_search(pb, std::move(tt), policy.max_iterations);
  return to_schedule(instance, pb, tt);
}

Schedule brute_force_schedule(const SchedulingInstance& instance) {
  if (instance.steps.size() > kBruteForceMaxSteps) {
    throw Error(ErrorCode::InstanceTooLarge,
                fmt::format("brute force is limited to {} steps, got {}", kBruteForceMaxSteps,
                            instance.steps.size()));
  }
  check_instance(instance);
  Problem pb(instance);
  Timetable best = list_schedule(pb);

  // tail[s]: longest duration chain starting at s (inclusive).
  std::vector<std::int64_t> tail(pb.n, 0);
  {
    std::vector<std::size_t> order;
    std::vector<int> indeg(pb.n);
    for (std::size_t s = 0; s < pb.n; ++s) {
      indeg[s] = static_cast<int>(pb.preds[s].size());
      if (!indeg[s]) order.push_back(s);
    }
    for (std::size_t k = 0; k < order.size(); ++k) {
      for (auto q : pb.succs[order[k]]) {
        if (--indeg[q] == 0) order.push_back(q);
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      std::int64_t t = 0;
      for (auto q : pb.succs[*it]) t = std::max(t, tail[q]);
      tail[*it] = pb.duration[*it] + t;
    }
  }

  Timetable cur;
  cur.resource.assign(pb.n, 0);
  cur.start.assign(pb.n, 0);
  std::vector<std::int64_t> finish(pb.n, 0);
  std::vector<bool> done(pb.n, false);
  std::vector<std::int64_t> free_at(pb.m, 0);

  // Every semi-active schedule is produced by appending steps to resources in
  // order of their start times, so enumerating (ready step, resource) choices
  // covers an optimal schedule.
  auto lower_bound = [&](std::int64_t makespan) {
    std::int64_t lb = makespan;
    for (std::size_t s = 0; s < pb.n; ++s) {
      if (done[s]) continue;
      std::int64_t st = std::numeric_limits<std::int64_t>::max();
      for (auto r : pb.eligible[s]) st = std::min(st, free_at[r]);
      for (auto p : pb.preds[s]) {
        if (done[p]) st = std::max(st, finish[p]);
      }
      lb = std::max(lb, st + tail[s]);
    }
    return lb;
  };

  std::function<void(std::size_t, std::int64_t)> dfs = [&](std::size_t placed, std::int64_t makespan) {
    if (placed == pb.n) {
      if (makespan < best.makespan) {
        best = cur;
        best.makespan = makespan;
      }
      return;
    }
    for (std::size_t s = 0; s < pb.n; ++s) {
      if (done[s]) continue;
      std::int64_t ready = 0;
      bool ok = true;
      for (auto p : pb.preds[s]) {
        if (!done[p]) {
          ok = false;
          break;
        }
        ready = std::max(ready, finish[p]);
      }
      if (!ok) continue;
      for (auto r : pb.eligible[s]) {
        const std::int64_t st = std::max(ready, free_at[r]);
        const std::int64_t end = st + pb.duration[s];
        const std::int64_t saved_free = free_at[r];
        done[s] = true;
        finish[s] = end;
        free_at[r] = end;
        cur.resource[s] = r;
        cur.start[s] = st;
        const std::int64_t ms = std::max(makespan, end);
        if (lower_bound(ms) < best.makespan) dfs(placed + 1, ms);
        free_at[r] = saved_free;
        done[s] = false;
      }
    }
  };
  dfs(0, 0);
  return to_schedule(instance, pb, best);
}

std::vector<std::string> feasibility_problems(const SchedulingInstance& instance,
                                              const Schedule& sched) {
  std::vector<std::string> problems;
  std::map<Iri, const Assignment*> by_step;
  for (const auto& a : sched.assignments) {
    if (!by_step.emplace(a.step, &a).second) {
      problems.push_back(fmt::format("step {} assigned twice", a.step.value));
    }
  }
  std::map<Iri, std::vector<std::pair<std::int64_t, std::int64_t>>> busy;
  std::int64_t makespan = 0;
  for (const auto& s : instance.steps) {
    auto it = by_step.find(s.step);
    if (it == by_step.end()) {
      problems.push_back(fmt::format("step {} is not assigned", s.step.value));
      continue;
    }
    const Assignment& a = *it->second;
    if (!std::binary_search(s.eligible.begin(), s.eligible.end(), a.resource)) {
      problems.push_back(fmt::format("step {} on ineligible resource {}", s.step.value, a.resource.value));
    }
    if (a.start_s < 0) problems.push_back(fmt::format("step {} starts before 0", s.step.value));
    if (a.duration_s != s.duration_s) {
      problems.push_back(fmt::format("step {} has duration {} instead of {}", s.step.value,
                                     a.duration_s, s.duration_s));
    }
    for (const auto& p : s.predecessors) {
      auto pit = by_step.find(p);
      if (pit != by_step.end() && a.start_s < pit->second->start_s + pit->second->duration_s) {
        problems.push_back(fmt::format("step {} starts before predecessor {} finishes",
                                       s.step.value, p.value));
      }
    }
    busy[a.resource].emplace_back(a.start_s, a.start_s + a.duration_s);
    makespan = std::max(makespan, a.start_s + a.duration_s);
  }
  if (by_step.size() > instance.steps.size()) problems.push_back("schedule has extra assignments");
  for (auto& [r, intervals] : busy) {
    std::sort(intervals.begin(), intervals.end());
    for (std::size_t i = 1; i < intervals.size(); ++i) {
      if (intervals[i].first < intervals[i - 1].second) {
        problems.push_back(fmt::format("overlapping steps on resource {}", r.value));
      }
    }
  }
  if (makespan != sched.makespan_s) {
    problems.push_back(fmt::format("makespan {} does not match {}", sched.makespan_s, makespan));
  }
  return problems;
}

void commit_schedule(AkgGraph& graph, const Schedule& sched) {
  if (sched.eligibility_token != graph.eligibility_version()) {
    throw Error(ErrorCode::StaleSchedule,
                "capabilities changed since the schedule was computed; reschedule first");
  }
  for (const auto& a : sched.assignments) {
    if (graph.node(a.step).kind != NodeKind::ProcessStepInstance) {
      throw Error(ErrorCode::KindMismatch, fmt::format("{} is not a ProcessStepInstance", a.step.value));
    }
    if (graph.node(a.resource).kind != NodeKind::Resource) {
      throw Error(ErrorCode::KindMismatch, fmt::format("{} is not a Resource", a.resource.value));
    }
  }
  for (const auto& a : sched.assignments) {
    for (const auto& r : graph.neighbors(a.step, EdgeKind::allocatedTo, Direction::Out)) {
      if (r != a.resource) graph.remove_edge(a.step, EdgeKind::allocatedTo, r);
    }
    graph.add_edge(a.step, EdgeKind::allocatedTo, a.resource);
    graph.set_attr(a.step, std::string(kAttrStart),
                   AttrValue::number(static_cast<double>(a.start_s)));
    graph.set_attr(a.step, std::string(kAttrDuration),
                   AttrValue::number(static_cast<double>(a.duration_s)));
  }
}

}  // namespace ppr
