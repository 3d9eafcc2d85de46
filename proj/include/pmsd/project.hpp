#pragma once

#include "pmsd/json_io.hpp"
#include "pmsd/validation.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pmsd {

enum class ArtifactKind {
  log,
  summary,
  dfg,
  sdlog_all,
  sdlog_active,
  stability,
  relations,
  detail,
  selections,
  cld,
  cld_mdl,
  mapping,
  sfd,
  sfd_mdl,
  equations,
  trace,
  validation,
};

std::string_view to_string(ArtifactKind kind);
std::optional<ArtifactKind> parse_artifact_kind(std::string_view text);
/// "csv", "json" or "mdl"
std::string_view artifact_extension(ArtifactKind kind);

struct ArtifactRef {
  ArtifactKind kind;
  std::filesystem::path path;
  int version = 1;
  std::string created_at;
  Json params;
};

Json to_json(const ArtifactRef& ref);

/// A directory of immutable artifact files plus `index.json`. Re-runs of a
/// step write `<name>-v2.<ext>`, `<name>-v3.<ext>`, ... and never touch
/// earlier files.
class Project {
 public:
  /// Creates the directory when missing.
  static Project open(const std::filesystem::path& root);

  const std::string& id() const { return id_; }
  const std::filesystem::path& root() const { return root_; }

  std::optional<ArtifactRef> latest(ArtifactKind kind) const;
  std::vector<ArtifactRef> history(ArtifactKind kind) const;
  /// Throws MissingInput.
  ArtifactRef require(ArtifactKind kind) const;
  std::string read(const ArtifactRef& ref) const;

  ArtifactRef write(ArtifactKind kind, std::string_view content, Json params = Json::object());

 private:
  explicit Project(std::filesystem::path root);
  void load_index();
  void save_index() const;

  std::filesystem::path root_;
  std::string id_;
  Json index_;
};

/// Step names: ingest, summary, dfg, sdlog, windows, relations, detail, cld,
/// sfd, fit, simulate, validate. Returns the artifacts written, primary one
/// first. Throws MissingInput when a declared input artifact is absent and
/// StepFailed wrapping any module error (detail = the module error code).
std::vector<ArtifactRef> run_step(Project& project, std::string_view step, const Json& params = Json::object());

/// Artifact kinds a step reads.
std::vector<ArtifactKind> step_inputs(std::string_view step);

// Typed readers over the latest artifacts.
EventLog load_log(const Project& project);
SDLog load_sdlog(const Project& project, ArtifactKind kind);
RelationReport load_relations(const Project& project);
CLD load_cld(const Project& project);
SFD load_sfd(const Project& project);
EquationSet load_equations(const Project& project);
SimulationTrace load_trace(const Project& project);

/// Non-interactive batch: ingest -> summary -> dfg -> sdlog -> relations ->
/// cld -> sfd -> fit -> simulate -> validate. `selections` holds
/// `relations` (list of {source, target, lag, kind?}) and `mapping`, plus
/// optional `relation_options`, `exogenous`, `horizon`, `tau`, `kappa`.
struct PipelineRequest {
  std::string log_csv;
  ColumnMapping mapping;
  TimeWindowSpec window;
  AspectSpec aspect;
  Json selections = Json::object();
};

ValidationReport full_pipeline(Project& project, const PipelineRequest& request);

}  // namespace pmsd
