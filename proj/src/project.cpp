#include "pmsd/project.hpp"

#include "pmsd/error.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace pmsd {

namespace fs = std::filesystem;

namespace {

constexpr ArtifactKind kAllKinds[] = {
    ArtifactKind::log,        ArtifactKind::summary,   ArtifactKind::dfg,     ArtifactKind::sdlog_all,
    ArtifactKind::sdlog_active, ArtifactKind::stability, ArtifactKind::relations, ArtifactKind::detail,
    ArtifactKind::selections, ArtifactKind::cld,       ArtifactKind::cld_mdl, ArtifactKind::mapping,
    ArtifactKind::sfd,        ArtifactKind::sfd_mdl,   ArtifactKind::equations, ArtifactKind::trace,
    ArtifactKind::validation,
};

std::string file_stem(ArtifactKind kind) {
  switch (kind) {
    case ArtifactKind::cld_mdl: return "cld";
    case ArtifactKind::sfd_mdl: return "sfd";
    default: return std::string(to_string(kind));
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path.string() + "'", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string now_iso() {
  return format_timestamp(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

}  // namespace

std::string_view to_string(ArtifactKind kind) {
  switch (kind) {
    case ArtifactKind::log: return "log";
    case ArtifactKind::summary: return "summary";
    case ArtifactKind::dfg: return "dfg";
    case ArtifactKind::sdlog_all: return "sdlog_all";
    case ArtifactKind::sdlog_active: return "sdlog_active";
    case ArtifactKind::stability: return "stability";
    case ArtifactKind::relations: return "relations";
    case ArtifactKind::detail: return "detail";
    case ArtifactKind::selections: return "selections";
    case ArtifactKind::cld: return "cld";
    case ArtifactKind::cld_mdl: return "cld_mdl";
    case ArtifactKind::mapping: return "mapping";
    case ArtifactKind::sfd: return "sfd";
    case ArtifactKind::sfd_mdl: return "sfd_mdl";
    case ArtifactKind::equations: return "equations";
    case ArtifactKind::trace: return "trace";
    case ArtifactKind::validation: return "validation";
  }
  return "unknown";
}

std::optional<ArtifactKind> parse_artifact_kind(std::string_view text) {
  for (auto k : kAllKinds) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::string_view artifact_extension(ArtifactKind kind) {
  switch (kind) {
    case ArtifactKind::log:
    case ArtifactKind::sdlog_all:
    case ArtifactKind::sdlog_active:
    case ArtifactKind::trace:
      return "csv";
    case ArtifactKind::cld_mdl:
    case ArtifactKind::sfd_mdl:
      return "mdl";
    default:
      return "json";
  }
}

Json to_json(const ArtifactRef& ref) {
  return {{"kind", std::string(to_string(ref.kind))},
          {"path", ref.path.string()},
          {"version", ref.version},
          {"created_at", ref.created_at}};
}

// ---------------------------------------------------------------------------
// Project

Project::Project(fs::path root) : root_(std::move(root)) {
  id_ = root_.filename().string();
  if (id_.empty()) id_ = root_.parent_path().filename().string();
}

Project Project::open(const fs::path& root) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create project directory '" + root.string() + "': " + ec.message());
  Project p(fs::absolute(root).lexically_normal());
  p.load_index();
  return p;
}

void Project::load_index() {
  const auto path = root_ / "index.json";
  if (fs::exists(path)) {
    index_ = Json::parse(read_file(path));
  } else {
    index_ = {{"id", id_}, {"artifacts", Json::object()}};
  }
}

void Project::save_index() const {
  const auto path = root_ / "index.json";
  const auto tmp = root_ / "index.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << index_.dump(2) << "\n";
    if (!out) throw Error(ErrorCode::Io, "cannot write project index");
  }
  fs::rename(tmp, path);
}

std::vector<ArtifactRef> Project::history(ArtifactKind kind) const {
  std::vector<ArtifactRef> out;
  const auto& arts = index_["artifacts"];
  auto it = arts.find(std::string(to_string(kind)));
  if (it == arts.end()) return out;
  for (const auto& e : *it) {
    out.push_back({kind, root_ / e["file"].get<std::string>(), e["version"].get<int>(),
                   e["created_at"].get<std::string>(), e.value("params", Json::object())});
  }
  return out;
}

std::optional<ArtifactRef> Project::latest(ArtifactKind kind) const {
  auto h = history(kind);
  if (h.empty()) return std::nullopt;
  return h.back();
}

ArtifactRef Project::require(ArtifactKind kind) const {
  auto ref = latest(kind);
  if (!ref) {
    throw Error(ErrorCode::MissingInput, "missing input artifact '" + std::string(to_string(kind)) + "'",
                std::string(to_string(kind)));
  }
  return *ref;
}

std::string Project::read(const ArtifactRef& ref) const { return read_file(ref.path); }

ArtifactRef Project::write(ArtifactKind kind, std::string_view content, Json params) {
  load_index();
  auto& list = index_["artifacts"][std::string(to_string(kind))];
  if (list.is_null()) list = Json::array();
  int version = static_cast<int>(list.size()) + 1;

  const std::string ext(artifact_extension(kind));
  fs::path path;
  std::FILE* f = nullptr;
  for (;; ++version) {
    const std::string name = file_stem(kind) + (version == 1 ? "" : "-v" + std::to_string(version)) + "." + ext;
    path = root_ / name;
    f = std::fopen(path.c_str(), "wbx");  // exclusive create: never overwrite
    if (f) break;
    if (!fs::exists(path)) throw Error(ErrorCode::Io, "cannot create artifact '" + path.string() + "'");
  }
  const bool ok = std::fwrite(content.data(), 1, content.size(), f) == content.size();
  std::fclose(f);
  if (!ok) throw Error(ErrorCode::Io, "short write to '" + path.string() + "'");

  ArtifactRef ref{kind, path, version, now_iso(), std::move(params)};
  list.push_back({{"file", path.filename().string()},
                  {"version", version},
                  {"created_at", ref.created_at},
                  {"params", ref.params}});
  save_index();
  return ref;
}

// ---------------------------------------------------------------------------
// typed readers

EventLog load_log(const Project& p) {
  return parse_event_log(p.read(p.require(ArtifactKind::log)));
}

SDLog load_sdlog(const Project& p, ArtifactKind kind) {
  const auto ref = p.require(kind);
  const auto& params = ref.params;
  return parse_sdlog_csv(p.read(ref), window_from_json(params.at("window")), params.value("filtered", false));
}

RelationReport load_relations(const Project& p) {
  return relation_report_from_json(Json::parse(p.read(p.require(ArtifactKind::relations))));
}

CLD load_cld(const Project& p) { return cld_from_json(Json::parse(p.read(p.require(ArtifactKind::cld)))); }

SFD load_sfd(const Project& p) { return sfd_from_json(Json::parse(p.read(p.require(ArtifactKind::sfd)))); }

EquationSet load_equations(const Project& p) {
  return equations_from_json(Json::parse(p.read(p.require(ArtifactKind::equations))));
}

SimulationTrace load_trace(const Project& p) { return parse_trace_csv(p.read(p.require(ArtifactKind::trace))); }

// ---------------------------------------------------------------------------
// steps

std::vector<ArtifactKind> step_inputs(std::string_view step) {
  using K = ArtifactKind;
  static const std::map<std::string, std::vector<K>, std::less<>> inputs = {
      {"ingest", {}},
      {"summary", {K::log}},
      {"dfg", {K::log}},
      {"sdlog", {K::log}},
      {"windows", {K::log}},
      {"relations", {K::sdlog_active}},
      {"detail", {K::sdlog_active}},
      {"cld", {K::relations}},
      {"sfd", {K::cld}},
      {"fit", {K::sfd, K::sdlog_all}},
      {"simulate", {K::sfd, K::equations, K::sdlog_all}},
      {"validate", {K::trace, K::sdlog_all, K::sfd, K::equations}},
  };
  auto it = inputs.find(step);
  if (it == inputs.end()) throw Error(ErrorCode::InvalidArgument, "unknown step '" + std::string(step) + "'");
  return it->second;
}

namespace {

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

int mdl_horizon(const Project& p) {
  if (auto ref = p.latest(ArtifactKind::sdlog_all)) return static_cast<int>(load_sdlog(p, ArtifactKind::sdlog_all).steps());
  return 100;
}

ArtifactKind relation_source(const Json& params) {
  return params.value("source", std::string("active")) == "all" ? ArtifactKind::sdlog_all : ArtifactKind::sdlog_active;
}

std::vector<ArtifactRef> step_ingest(Project& p, const Json& params) {
  std::string text;
  if (params.contains("csv")) {
    text = params["csv"].get<std::string>();
  } else if (params.contains("path")) {
    text = read_file(params["path"].get<std::string>());
  } else {
    throw Error(ErrorCode::InvalidArgument, "ingest needs 'csv' or 'path'");
  }
  ColumnMapping mapping = params.contains("mapping") ? column_mapping_from_json(params["mapping"]) : ColumnMapping{};
  ParseOptions opts;
  opts.lenient = params.value("lenient", false);
  EventLog log = parse_event_log(text, mapping, opts);
  const std::size_t skipped = log.skipped_rows;
  log.column_mapping = ColumnMapping{};  // stored artifact always uses the default column names
  Json recorded = {{"source_mapping", to_json(mapping)}, {"skipped_rows", skipped}};
  if (params.contains("path")) recorded["source_path"] = params["path"];
  return {p.write(ArtifactKind::log, write_event_log_csv(log), recorded)};
}

std::vector<ArtifactRef> step_sdlog(Project& p, const Json& params) {
  Json wj = params.contains("window") ? params["window"] : Json("1d");
  TimeWindowSpec window = window_from_json(wj);
  if (params.contains("origin") && !params["origin"].is_null()) {
    const auto text = params["origin"].get<std::string>();
    auto ts = parse_timestamp(text);
    if (!ts) throw Error(ErrorCode::BadTimestamp, "bad origin '" + text + "'", text);
    window.origin = *ts;
  }
  const AspectSpec aspect = aspect_from_json(params.contains("aspect") && params["aspect"].is_object()
                                                 ? params["aspect"]
                                                 : Json{{"aspect", params.value("aspect", std::string("general"))},
                                                        {"entities", params.value("entities", Json(nullptr))},
                                                        {"top_n", params.value("top_n", std::size_t{10})}});
  const SDLog all = generate_sdlog(load_log(p), window, aspect);
  const SDLog active = filter_active(all);
  Json base = {{"window", to_json(all.window)}, {"aspect", std::string(to_string(aspect.aspect))}};
  Json pa = base, pf = base;
  pa["filtered"] = all.filtered;
  pf["filtered"] = active.filtered;
  return {p.write(ArtifactKind::sdlog_all, export_sdlog_csv(all), pa),
          p.write(ArtifactKind::sdlog_active, export_sdlog_csv(active), pf)};
}

std::vector<ArtifactRef> step_windows(Project& p, const Json& params) {
  std::vector<WindowCandidate> cands;
  Json list = params.value("candidates", Json::array());
  if (list.is_string()) {
    Json split = Json::array();
    std::stringstream ss(list.get<std::string>());
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) split.push_back(item);
    }
    list = split;
  }
  for (const auto& c : list) {
    if (c.is_string()) {
      cands.push_back({parse_window(c.get<std::string>()), c.get<std::string>()});
    } else {
      const auto w = window_from_json(c);
      cands.push_back({w, c.value("label", window_label(w))});
    }
  }
  StabilityOptions opts;
  opts.split_ratio = params.value("split_ratio", opts.split_ratio);
  opts.smooth = params.value("smooth", false);
  opts.min_steps = params.value("min_steps", opts.min_steps);
  if (params.contains("aspects")) {
    opts.aspects.clear();
    for (const auto& a : params["aspects"]) opts.aspects.push_back(aspect_from_json(a));
  }
  const auto kind = parse_model_kind(params.value("model", std::string("ar_p")));
  const auto report = assess_windows(load_log(p), cands, kind, opts);
  return {p.write(ArtifactKind::stability, dump(to_json(report)), params)};
}

std::vector<ArtifactRef> step_relations(Project& p, const Json& params) {
  RelationOptions opts;
  opts.threshold = params.value("threshold", opts.threshold);
  opts.max_lag = params.value("max_lag", opts.max_lag);
  opts.min_support = params.value("min_support", opts.min_support);
  const auto report = detect_relations(load_sdlog(p, relation_source(params)), opts);
  Json recorded = {{"threshold", opts.threshold}, {"max_lag", opts.max_lag}, {"min_support", opts.min_support}};
  return {p.write(ArtifactKind::relations, dump(to_json(report)), recorded)};
}

std::vector<ArtifactRef> step_detail(Project& p, const Json& params) {
  const auto detail = detail_pair(load_sdlog(p, relation_source(params)), params.at("source").get<std::string>(),
                                  params.at("target").get<std::string>(), params.value("lag", 0));
  return {p.write(ArtifactKind::detail, dump(to_json(detail)), params)};
}

std::vector<ArtifactRef> step_cld(Project& p, const Json& params) {
  Json list = params.value("selections", Json::array());
  if (list.is_object()) list = list.value("relations", Json::array());
  std::vector<RelationSelection> sel;
  for (const auto& s : list) sel.push_back(selection_from_json(s));
  const auto chosen = resolve_selections(sel, load_relations(p));
  const CLD cld = build_cld(chosen);

  Json persisted = Json::array();
  for (const auto& s : sel) persisted.push_back(to_json(s));
  const MdlOptions mdl{mdl_horizon(p)};
  return {p.write(ArtifactKind::cld, dump(to_json(cld))),
          p.write(ArtifactKind::selections, dump({{"relations", persisted}})),
          p.write(ArtifactKind::cld_mdl, export_mdl(cld, mdl))};
}

std::vector<ArtifactRef> step_sfd(Project& p, const Json& params) {
  const ElementMapping mapping = element_mapping_from_json(params.value("mapping", Json::object()));
  const SFD sfd = derive_sfd(load_cld(p), mapping);
  const MdlOptions mdl{mdl_horizon(p)};
  return {p.write(ArtifactKind::sfd, dump(to_json(sfd))),
          p.write(ArtifactKind::mapping, dump(to_json(mapping))),
          p.write(ArtifactKind::sfd_mdl, export_mdl(sfd, mdl))};
}

std::vector<ArtifactRef> step_fit(Project& p, const Json& params) {
  const auto policy = parse_exogenous_policy(params.value("exogenous", std::string("replay")));
  const auto eqs = fit_equations(load_sfd(p), load_sdlog(p, ArtifactKind::sdlog_all), policy);
  return {p.write(ArtifactKind::equations, dump(to_json(eqs)), {{"exogenous", std::string(to_string(policy))}})};
}

std::vector<ArtifactRef> step_simulate(Project& p, const Json& params) {
  const SDLog sd = load_sdlog(p, ArtifactKind::sdlog_all);
  SimulationConfig config;
  config.horizon = params.contains("horizon") && !params["horizon"].is_null() ? params["horizon"].get<std::size_t>()
                                                                               : sd.steps();
  config.exogenous = parse_exogenous_policy(params.value("exogenous", std::string("replay")));
  config.overflow_guard = params.value("overflow_guard", config.overflow_guard);
  if (params.contains("initial_stocks")) {
    config.initial_stocks = params["initial_stocks"].get<std::map<std::string, double>>();
  }
  const auto trace = simulate(load_sfd(p), load_equations(p), sd, config);
  Json recorded = {{"horizon", config.horizon},
                   {"exogenous", std::string(to_string(config.exogenous))},
                   {"prehistory_reads", trace.prehistory_reads}};
  return {p.write(ArtifactKind::trace, export_trace_csv(trace), recorded)};
}

std::vector<ArtifactRef> step_validate(Project& p, const Json& params) {
  const SDLog sd = load_sdlog(p, ArtifactKind::sdlog_all);
  std::vector<std::string> vars;
  if (params.contains("variables") && !params["variables"].is_null()) {
    vars = params["variables"].get<std::vector<std::string>>();
  } else {
    vars = endogenous_variables(load_sfd(p), load_equations(p), sd);
  }
  ValidationThresholds th;
  th.mape_max = params.value("tau", th.mape_max);
  th.ks_max = params.value("kappa", th.ks_max);
  const auto report = validate(load_trace(p), sd, vars, th);
  return {p.write(ArtifactKind::validation, dump(to_json(report)))};
}

}  // namespace

std::vector<ArtifactRef> run_step(Project& p, std::string_view step, const Json& params) {
  for (auto kind : step_inputs(step)) p.require(kind);

  using Handler = std::vector<ArtifactRef> (*)(Project&, const Json&);
  static const std::map<std::string, Handler, std::less<>> handlers = {
      {"ingest", step_ingest},
      {"summary", [](Project& pr, const Json&) {
         return std::vector<ArtifactRef>{pr.write(ArtifactKind::summary, dump(to_json(summarize(load_log(pr)))))};
       }},
      {"dfg", [](Project& pr, const Json&) {
         return std::vector<ArtifactRef>{pr.write(ArtifactKind::dfg, dump(to_json(build_dfg(load_log(pr)))))};
       }},
      {"sdlog", step_sdlog},
      {"windows", step_windows},
      {"relations", step_relations},
      {"detail", step_detail},
      {"cld", step_cld},
      {"sfd", step_sfd},
      {"fit", step_fit},
      {"simulate", step_simulate},
      {"validate", step_validate},
  };
  const auto& handler = handlers.find(step)->second;
  try {
    return handler(p, params);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MissingInput || e.code() == ErrorCode::StepFailed) throw;
    throw Error(ErrorCode::StepFailed, std::string(step) + ": " + e.what(), std::string(to_string(e.code())));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::StepFailed, std::string(step) + ": bad parameters: " + e.what(),
                std::string(to_string(ErrorCode::InvalidArgument)));
  }
}

ValidationReport full_pipeline(Project& p, const PipelineRequest& req) {
  const Json& sel = req.selections.is_object() ? req.selections : Json::object();
  run_step(p, "ingest", {{"csv", req.log_csv}, {"mapping", to_json(req.mapping)}});
  run_step(p, "summary");
  run_step(p, "dfg");

  Json aspect = {{"aspect", std::string(to_string(req.aspect.aspect))}, {"top_n", req.aspect.top_n}};
  if (req.aspect.entities) aspect["entities"] = *req.aspect.entities;
  Json window = to_json(req.window);
  run_step(p, "sdlog", {{"window", window}, {"aspect", aspect}});

  run_step(p, "relations", sel.value("relation_options", Json::object()));
  run_step(p, "cld", {{"selections", sel.value("relations", Json::array())}});
  run_step(p, "sfd", {{"mapping", sel.value("mapping", Json::object())}});
  const std::string exo = sel.value("exogenous", std::string("replay"));
  run_step(p, "fit", {{"exogenous", exo}});
  Json sim = {{"exogenous", exo}};
  if (sel.contains("horizon")) sim["horizon"] = sel["horizon"];
  run_step(p, "simulate", sim);
  Json val = Json::object();
  if (sel.contains("tau")) val["tau"] = sel["tau"];
  if (sel.contains("kappa")) val["kappa"] = sel["kappa"];
  if (sel.contains("variables")) val["variables"] = sel["variables"];
  const auto refs = run_step(p, "validate", val);
  return validation_from_json(Json::parse(p.read(refs.front())));
}

}  // namespace pmsd
