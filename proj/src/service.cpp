#include "pmsd/service.hpp"

#include "pmsd/error.hpp"
#include "pmsd/project.hpp"

#include "httplib.h"

#include <map>
#include <mutex>
#include <regex>
#include <thread>

namespace pmsd {

namespace {

int status_for(const Error& e) {
  ErrorCode code = e.code();
  if (code == ErrorCode::StepFailed) {
    // the inner module error decides between caller mistakes and data problems
    if (e.detail() == to_string(ErrorCode::Io)) return 500;
    return 422;
  }
  switch (code) {
    case ErrorCode::MissingInput:
    case ErrorCode::UnknownVariable:
      return 404;
    case ErrorCode::InvalidArgument:
      return 400;
    case ErrorCode::Io:
      return 500;
    default:
      return 422;
  }
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message,
                const std::string& detail) {
  res.status = status;
  res.set_content(Json{{"code", code}, {"message", message}, {"detail", detail}}.dump(), "application/json");
}

std::string content_type(ArtifactKind kind) {
  const auto ext = artifact_extension(kind);
  if (ext == "csv") return "text/csv";
  if (ext == "mdl") return "text/plain; charset=utf-8";
  return "application/json";
}

Json refs_json(const std::vector<ArtifactRef>& refs) {
  Json out = Json::array();
  for (const auto& r : refs) out.push_back(to_json(r));
  return out;
}

}  // namespace

struct Service::Impl {
  std::filesystem::path root;
  httplib::Server server;
  std::thread thread;
  std::mutex locks_mutex;
  std::map<std::string, std::shared_ptr<std::mutex>> locks;

  std::shared_ptr<std::mutex> lock_for(const std::string& id) {
    std::lock_guard guard(locks_mutex);
    auto& m = locks[id];
    if (!m) m = std::make_shared<std::mutex>();
    return m;
  }

  Project project(const std::string& id) {
    static const std::regex valid("[A-Za-z0-9_.-]+");
    if (!std::regex_match(id, valid) || id == "." || id == "..") {
      throw Error(ErrorCode::InvalidArgument, "invalid project id '" + id + "'", id);
    }
    return Project::open(root / id);
  }

  // Wraps a handler with error mapping; `fn` gets the project id.
  template <class Fn>
  httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res, req.matches[1].str());
      } catch (const Error& e) {
        send_error(res, status_for(e), to_string(e.code()), e.what(), e.detail());
      } catch (const nlohmann::json::exception& e) {
        send_error(res, 400, "invalid_argument", std::string("bad JSON body: ") + e.what(), "");
      } catch (const std::exception& e) {
        send_error(res, 500, "internal", e.what(), "");
      }
    };
  }

  static Json body_json(const httplib::Request& req) {
    if (req.body.empty()) return Json::object();
    return Json::parse(req.body);
  }

  // Runs a step under the project lock and replies with the primary artifact
  // when it is JSON, otherwise with the list of written artifacts.
  void respond_step(httplib::Response& res, const std::string& id, std::string_view step, const Json& params) {
    auto lock = lock_for(id);
    std::lock_guard guard(*lock);
    Project p = project(id);
    const auto refs = run_step(p, step, params);
    res.set_header("X-Artifacts", refs_json(refs).dump());
    const auto& primary = refs.front();
    if (artifact_extension(primary.kind) == "json") {
      res.set_content(p.read(primary), "application/json");
    } else {
      res.set_content(Json{{"artifacts", refs_json(refs)}}.dump(2), "application/json");
    }
  }

  // Latest artifact of `kind`, computing it with `step` first when absent.
  void respond_latest(httplib::Response& res, const std::string& id, ArtifactKind kind, const char* step) {
    auto lock = lock_for(id);
    std::lock_guard guard(*lock);
    Project p = project(id);
    auto ref = p.latest(kind);
    if (!ref && step) ref = run_step(p, step).front();
    if (!ref) ref = p.require(kind);
    res.set_content(p.read(*ref), content_type(kind));
  }

  void routes() {
    const std::string base = R"(/api/projects/([^/]+)/)";

    server.Post(base + "log", guarded([this](const httplib::Request& req, httplib::Response& res, const std::string& id) {
      Json params;
      if (req.get_header_value("Content-Type").rfind("text/csv", 0) == 0) {
        params = {{"csv", req.body}};
      } else {
        params = body_json(req);
      }
      if (params.contains("path")) {
        throw Error(ErrorCode::InvalidArgument, "upload the log content as 'csv'; server-side paths are not accepted");
      }
      respond_step(res, id, "ingest", params);
    }));

    server.Get(base + "summary", guarded([this](const httplib::Request&, httplib::Response& res, const std::string& id) {
      respond_latest(res, id, ArtifactKind::summary, "summary");
    }));
    server.Get(base + "dfg", guarded([this](const httplib::Request&, httplib::Response& res, const std::string& id) {
      respond_latest(res, id, ArtifactKind::dfg, "dfg");
    }));
    server.Get(base + "relations", guarded([this](const httplib::Request&, httplib::Response& res, const std::string& id) {
      respond_latest(res, id, ArtifactKind::relations, nullptr);
    }));

    const std::pair<const char*, const char*> posts[] = {
        {"sdlog", "sdlog"},   {"windows", "windows"}, {"relations", "relations"}, {"pair-detail", "detail"},
        {"cld", "cld"},       {"sfd", "sfd"},         {"fit", "fit"},             {"simulate", "simulate"},
        {"validate", "validate"}, {"summary", "summary"}, {"dfg", "dfg"},
    };
    for (const auto& [route, step] : posts) {
      const std::string s = step;
      server.Post(base + route, guarded([this, s](const httplib::Request& req, httplib::Response& res,
                                                  const std::string& id) { respond_step(res, id, s, body_json(req)); }));
    }

    server.Get(base + R"(artifacts/([a-z_]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res, const std::string& id) {
                 const std::string name = req.matches[2].str();
                 const auto kind = parse_artifact_kind(name);
                 if (!kind) throw Error(ErrorCode::MissingInput, "unknown artifact kind '" + name + "'", name);
                 Project p = project(id);
                 if (req.has_param("version")) {
                   const int v = std::stoi(req.get_param_value("version"));
                   for (const auto& ref : p.history(*kind)) {
                     if (ref.version == v) {
                       res.set_content(p.read(ref), content_type(*kind));
                       return;
                     }
                   }
                   throw Error(ErrorCode::MissingInput, "no version " + std::to_string(v) + " of '" + name + "'", name);
                 }
                 const auto ref = p.require(*kind);
                 res.set_header("Content-Disposition", "attachment; filename=\"" + ref.path.filename().string() + "\"");
                 res.set_content(p.read(ref), content_type(*kind));
               }));

    server.Get(base + "artifacts", guarded([this](const httplib::Request&, httplib::Response& res, const std::string& id) {
      Project p = project(id);
      Json out = Json::object();
      for (int k = 0; k <= static_cast<int>(ArtifactKind::validation); ++k) {
        const auto kind = static_cast<ArtifactKind>(k);
        Json list = Json::array();
        for (const auto& ref : p.history(kind)) list.push_back(to_json(ref));
        if (!list.empty()) out[std::string(to_string(kind))] = list;
      }
      res.set_content(out.dump(2), "application/json");
    }));
  }
};

Service::Service(std::filesystem::path projects_root, std::optional<std::filesystem::path> ui_dir)
    : impl_(std::make_unique<Impl>()) {
  impl_->root = std::move(projects_root);
  std::filesystem::create_directories(impl_->root);
  // httplib defaults to SO_REUSEPORT, which would let two services share a port
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  impl_->routes();
  if (ui_dir && std::filesystem::is_directory(*ui_dir)) impl_->server.set_mount_point("/", ui_dir->string());
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  int bound = -1;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    bound = port;
  }
  if (bound <= 0) {
    throw Error(ErrorCode::PortInUse, "cannot bind " + host + ":" + std::to_string(port), std::to_string(port));
  }
  return bound;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::start() {
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void Service::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace pmsd
