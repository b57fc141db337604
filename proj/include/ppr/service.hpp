#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ppr/json_io.hpp"
#include "ppr/nl.hpp"
#include "ppr/scheduler.hpp"

namespace ppr {

using nlohmann::json;

struct ApiError {
  std::string code;
  std::string message;
};

struct ApiResponse {
  int status = 200;
  json data;  // null on failure unless the operation has error details
  std::vector<ApiError> errors;
  std::uint64_t graph_version = 0;

  bool ok() const noexcept { return errors.empty(); }
  /// {"ok", "data", "errors": [{"code", "message"}], "graph_version"}
  json envelope() const;
};

/// HTTP status used for an engine error code.
int http_status(ErrorCode code);

/// Immutable graph plus the service-level version it was published under.
struct Snapshot {
  std::shared_ptr<const AkgGraph> graph;
  std::uint64_t version = 0;
};

/// The service core without any transport. Reads work on the current snapshot
/// and never block on writers; mutations are serialized, applied to a private
/// copy and published in one step, so a failed or half-done mutation is never
/// visible. graph_version starts at 1 and grows by one per committed mutation.
class Engine {
 public:
  explicit Engine(AkgGraph graph = {}, std::shared_ptr<const nl::Backend> backend = nullptr);

  Snapshot snapshot() const;
  std::uint64_t graph_version() const { return snapshot().version; }

  // Reads.
  ApiResponse export_graph() const;
  ApiResponse node(std::string_view iri) const;
  ApiResponse validate() const;
  ApiResponse eligible(std::string_view step) const;
  ApiResponse conditions(const std::optional<std::string>& asset) const;
  /// {condition, affected_step?, observed_on_resource?}
  ApiResponse diagnose(const json& body) const;
  /// {question, session?}; read-only intents only.
  ApiResponse chat(const json& body) const;

  // Mutations.
  /// Replaces the graph, or merges into it when `merge` is set. Cycles in
  /// hasSuccessor are rejected.
  ApiResponse ingest_turtle(std::string_view text, bool merge = false);
  /// {product, n}
  ApiResponse create_runs(const json& body);
  /// {run_ids, policy?} schedules existing runs and keeps the result as the
  /// pending schedule. {product, n, policy?} is a preview on a scratch copy
  /// and changes nothing.
  ApiResponse schedule(const json& body);
  /// Commits the pending schedule. StaleSchedule when eligibility changed.
  ApiResponse commit_schedule();
  /// {capability, action: "add"|"remove"}
  ApiResponse capability_change(std::string_view resource, const json& body);

 private:
  template <typename Fn>
  ApiResponse read(Fn&& fn) const;
  template <typename Fn>
  ApiResponse mutate(Fn&& fn);

  static Schedule schedule_preview(const AkgGraph& graph, const Iri& product, std::size_t n,
                                   const SchedulePolicy& policy);

  std::shared_ptr<const nl::Backend> backend_;

  mutable std::mutex snapshot_mutex_;  // guards current_ and pending_
  Snapshot current_;
  std::optional<Schedule> pending_;

  std::mutex writer_mutex_;  // one mutation at a time
};

/// Policy fields accepted in request bodies: {improve, max_iterations}.
SchedulePolicy policy_from_json(const json& policy);

}  // namespace ppr
