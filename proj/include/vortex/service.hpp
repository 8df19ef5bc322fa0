#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <semaphore>
#include <string>

#include "vortex/bundle.hpp"

namespace httplib {
class Server;
}

namespace vortex {

struct ServiceOptions {
  std::ptrdiff_t cluster_workers = 2;  // concurrent cluster jobs
};

struct ServiceResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Read-only HTTP view of a loaded bundle. Cluster requests are computed per
// request and never touch the bundle.
class BundleService {
 public:
  explicit BundleService(ExportBundle bundle, ServiceOptions options = {});
  ~BundleService();
  BundleService(const BundleService&) = delete;
  BundleService& operator=(const BundleService&) = delete;

  // Transport-independent dispatch, shared by the HTTP server.
  ServiceResponse handle(const std::string& method, const std::string& path,
                         const std::multimap<std::string, std::string>& query, const std::string& body) const;

  // Binds host:port (port 0 picks a free port) and returns the bound port;
  // -1 on failure. Serving starts with run().
  int bind(const std::string& host, int port);
  void run();  // blocks until stop()
  void stop();

  [[nodiscard]] const ExportBundle& bundle() const noexcept { return bundle_; }

 private:
  ServiceResponse subtree(const std::multimap<std::string, std::string>& query) const;
  ServiceResponse cluster(const std::string& body) const;

  const ExportBundle bundle_;
  std::vector<std::int64_t> candidates_;
  mutable std::counting_semaphore<1024> cluster_slots_;
  std::unique_ptr<httplib::Server> server_;
};

// "host:port" -> pair; throws ValidationError on a malformed address.
std::pair<std::string, int> parse_bind_address(const std::string& address);

// Loads the bundle and serves it until the process is stopped.
void serve(const std::filesystem::path& bundle_path, const std::string& bind_address, ServiceOptions options = {});

}  // namespace vortex
