#include "ppr/http.hpp"

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>
#include <httplib.h>

#include "ppr/turtle.hpp"

namespace ppr {

std::pair<std::string, int> parse_address(const std::string& address) {
  std::string host = "127.0.0.1";
  std::string port = "8080";
  if (!address.empty()) {
    auto colon = address.rfind(':');
    if (colon == std::string::npos) {
      port = address;
    } else {
      if (colon > 0) host = address.substr(0, colon);
      port = address.substr(colon + 1);
    }
  }
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  int p = -1;
  try {
    std::size_t used = 0;
    p = std::stoi(port, &used);
    if (used != port.size()) p = -1;
  } catch (const std::exception&) {
  }
  if (p < 0 || p > 65535) throw Error(ErrorCode::InvalidArgument, "bad address '" + address + "'");
  return {host, p};
}

namespace {

void reply(httplib::Response& res, const ApiResponse& r) {
  res.status = r.status;
  res.set_content(r.envelope().dump(), "application/json");
}

// Parses a JSON request body; an empty body counts as {}.
std::optional<json> body_of(const httplib::Request& req, httplib::Response& res, const Engine& engine) {
  if (req.body.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded()) {
    ApiResponse r;
    r.status = 400;
    r.data = nullptr;
    r.errors.push_back({"InvalidArgument", "request body is not valid JSON"});
    r.graph_version = engine.graph_version();
    reply(res, r);
    return std::nullopt;
  }
  return body;
}

}  // namespace

HttpService::HttpService(Engine& engine, std::size_t threads)
    : engine_(engine), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;
  s.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };

  // The operator console is served from a different origin.
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                         {"Access-Control-Allow-Headers", "Content-Type"},
                         {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  s.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  s.Get("/api/graph", [this](const httplib::Request&, httplib::Response& res) { reply(res, engine_.export_graph()); });

  s.Post("/api/graph/ttl", [this](const httplib::Request& req, httplib::Response& res) {
    bool merge = req.has_param("mode") && req.get_param_value("mode") == "merge";
    reply(res, engine_.ingest_turtle(req.body, merge));
  });

  s.Get(R"(/api/nodes/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, engine_.node(req.matches[1].str()));
  });

  s.Get("/api/validate", [this](const httplib::Request&, httplib::Response& res) { reply(res, engine_.validate()); });

  s.Get(R"(/api/processes/(.+)/eligible)", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, engine_.eligible(req.matches[1].str()));
  });

  s.Post("/api/runs", [this](const httplib::Request& req, httplib::Response& res) {
    if (auto body = body_of(req, res, engine_)) reply(res, engine_.create_runs(*body));
  });

  s.Post("/api/schedule", [this](const httplib::Request& req, httplib::Response& res) {
    if (auto body = body_of(req, res, engine_)) reply(res, engine_.schedule(*body));
  });

  s.Post("/api/schedule/commit", [this](const httplib::Request&, httplib::Response& res) {
    reply(res, engine_.commit_schedule());
  });

  s.Post(R"(/api/resources/(.+)/capability)", [this](const httplib::Request& req, httplib::Response& res) {
    if (auto body = body_of(req, res, engine_)) reply(res, engine_.capability_change(req.matches[1].str(), *body));
  });

  s.Get("/api/conditions", [this](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::string> asset;
    if (req.has_param("asset")) asset = req.get_param_value("asset");
    reply(res, engine_.conditions(asset));
  });

  s.Post("/api/diagnose", [this](const httplib::Request& req, httplib::Response& res) {
    if (auto body = body_of(req, res, engine_)) reply(res, engine_.diagnose(*body));
  });

  s.Post("/api/chat", [this](const httplib::Request& req, httplib::Response& res) {
    if (auto body = body_of(req, res, engine_)) reply(res, engine_.chat(*body));
  });

  s.set_exception_handler([this](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    ApiResponse r;
    r.status = 500;
    r.data = nullptr;
    r.errors.push_back({"Internal", what});
    r.graph_version = engine_.graph_version();
    reply(res, r);
  });

  s.set_error_handler([this](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    ApiResponse r;
    r.status = res.status;
    r.data = nullptr;
    r.errors.push_back({res.status == 404 ? "NotFound" : "HttpError",
                        fmt::format("{} {} -> HTTP {}", req.method, req.path, res.status)});
    r.graph_version = engine_.graph_version();
    reply(res, r);
  });
}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  bool ok = port == 0 ? (port = server_->bind_to_any_port(host)) > 0 : server_->bind_to_port(host, port);
  if (!ok) throw std::runtime_error(fmt::format("cannot bind {}:{}", host, port));
  return port;
}

void HttpService::start() {
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void HttpService::run() { server_->listen_after_bind(); }

void HttpService::stop() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

namespace {

HttpService* g_running = nullptr;

void on_signal(int) {
  if (g_running) g_running->stop();
}

}  // namespace

int serve(const std::string& address) {
  AkgGraph graph;
  if (const char* path = std::getenv("PPR_GRAPH"); path && *path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      std::cerr << "cannot read " << path << "\n";
      return 3;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    auto loaded = ttl::load_turtle(ss.str());
    if (!loaded.graph) {
      for (const auto& e : loaded.errors) std::cerr << path << ":" << ttl::format_error(e) << "\n";
      return 3;
    }
    graph = std::move(*loaded.graph);
  }

  std::string addr = address;
  if (addr.empty()) {
    if (const char* env = std::getenv("PPR_ADDR")) addr = env;
  }
  std::pair<std::string, int> hp;
  try {
    hp = parse_address(addr);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  Engine engine(std::move(graph), nl::backend_from_env());
  HttpService http(engine);
  int port = 0;
  try {
    port = http.bind(hp.first, hp.second);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
  std::cerr << fmt::format("serving on http://{}:{} ({} nodes)\n", hp.first, port,
                           engine.snapshot().graph->nodes().size());
  g_running = &http;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  http.run();
  g_running = nullptr;
  return 0;
}

}  // namespace ppr
