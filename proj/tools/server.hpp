#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

namespace httplib {
class Server;
}

namespace relief::server {

struct ServerConfig {
  std::filesystem::path project_dir;
  std::optional<std::filesystem::path> static_dir;
};

/// HTTP front end for the annotation UI. Projects live under
/// `project_dir/<id>/` as project.json plus image1.png / image2.png.
///
///   GET  /api/health
///   POST /api/projects                      create (optional project JSON body)
///   GET  /api/projects/{id}                 project JSON
///   PUT  /api/projects/{id}                 replace; 422 + diagnostics if invalid
///   GET  /api/projects/{id}/images/{1|2}    PNG
///   PUT  /api/projects/{id}/images/{1|2}    PNG upload
///   POST /api/projects/{id}/preview         merged grayscale PNG (base64) + diagnostics
///   POST /api/projects/{id}/cells           manual height edits
///   POST /api/projects/{id}/stl             STL download (?format=ascii)
///
/// Reads of one project run concurrently; writes to it are serialized.
class ReliefServer {
 public:
  explicit ReliefServer(ServerConfig config);
  ~ReliefServer();

  ReliefServer(const ReliefServer&) = delete;
  ReliefServer& operator=(const ReliefServer&) = delete;

  /// Binds without serving. Port 0 picks a free port. Returns false when the
  /// port is taken.
  bool bind(const std::string& host, int port);
  int port() const noexcept { return port_; }

  /// Serves until stop() is called.
  bool listen();
  void stop();

 private:
  void install_routes();
  std::shared_ptr<std::shared_mutex> lock_for(const std::string& id);

  ServerConfig config_;
  std::unique_ptr<httplib::Server> http_;
  int port_ = 0;
  std::mutex locks_mutex_;
  std::map<std::string, std::shared_ptr<std::shared_mutex>> locks_;
};

}  // namespace relief::server
