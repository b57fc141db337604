#pragma once

#include <memory>
#include <string>
#include <thread>

#include "ppr/service.hpp"

namespace httplib {
class Server;
}

namespace ppr {

/// "host:port" (or ":port", or just "port"); defaults to 127.0.0.1:8080.
std::pair<std::string, int> parse_address(const std::string& address);

/// httplib front end for an Engine. Routes are under /api; path segments that
/// carry an IRI must be percent-encoded (prefixed names like ex:Robot1 work
/// as-is).
class HttpService {
 public:
  explicit HttpService(Engine& engine, std::size_t threads = 32);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds and returns the port; port 0 picks a free one. Throws
  /// std::runtime_error when binding fails.
  int bind(const std::string& host, int port);
  /// Serves on a background thread until stop().
  void start();
  /// Serves on the calling thread until stop() is called elsewhere.
  void run();
  void stop();

 private:
  Engine& engine_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

/// Blocking server for `ppr serve`: PPR_GRAPH is loaded at boot and PPR_ADDR
/// is the default address. Returns a process exit code.
int serve(const std::string& address);

}  // namespace ppr
