#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace pmsd {

/// HTTP adapter over run_step. Each project lives in `<projects_root>/<id>`.
/// Routes are under `/api/projects/<id>/`; errors are `{code, message, detail}`.
class Service {
 public:
  explicit Service(std::filesystem::path projects_root,
                   std::optional<std::filesystem::path> ui_dir = std::nullopt);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Port 0 picks a free port. Returns the bound port; throws PortInUse.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void run();
  /// run() on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pmsd
