#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ppr/graph.hpp"

namespace ppr {

struct SchedulingStep {
  Iri step;
  std::int64_t duration_s = 1;
  std::vector<Iri> eligible;      // sorted, non-empty
  std::vector<Iri> predecessors;  // sorted
};

struct SchedulingInstance {
  std::vector<SchedulingStep> steps;  // sorted by step IRI
  std::vector<Iri> resources;         // sorted
  std::uint64_t eligibility_token = 0;
};

/// Throws InvalidInstance when durations, eligibility or precedence are bad.
void check_instance(const SchedulingInstance& instance);

struct Assignment {
  Iri step;
  Iri resource;
  std::int64_t start_s = 0;
  std::int64_t duration_s = 1;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct Schedule {
  std::vector<Assignment> assignments;  // sorted by step IRI
  std::int64_t makespan_s = 0;
  std::uint64_t eligibility_token = 0;

  const Assignment* find(const Iri& step) const;
  friend bool operator==(const Schedule&, const Schedule&) = default;
};

struct SchedulePolicy {
  bool improve = false;
  std::size_t max_iterations = 1000;
  std::uint64_t seed = 0;  // reserved
};

/// One scheduling step per ProcessStepInstance of the runs; precedence comes
/// from class-level hasSuccessor within each run. Throws StarvedStep.
SchedulingInstance build_instance(const AkgGraph& graph, std::span<const ProcessRun> runs);

/// List scheduling, optionally followed by steepest-descent local search.
/// Deterministic for fixed inputs.
Schedule schedule(const SchedulingInstance& instance, const SchedulePolicy& policy = {});

inline constexpr std::size_t kBruteForceMaxSteps = 8;

/// Exact minimum makespan by exhaustive search. Throws InstanceTooLarge above
/// kBruteForceMaxSteps steps.
Schedule brute_force_schedule(const SchedulingInstance& instance);

/// Human-readable feasibility problems; empty when the schedule is feasible.
std::vector<std::string> feasibility_problems(const SchedulingInstance& instance,
                                              const Schedule& schedule);

/// Writes allocatedTo edges and start_s/duration_s attributes. Throws
/// StaleSchedule when eligibility changed since the instance was built.
void commit_schedule(AkgGraph& graph, const Schedule& schedule);

}  // namespace ppr
