// Command-line front end. Exit codes: 0 ok, 2 usage, 3 step failure.

#include "pmsd/error.hpp"
#include "pmsd/project.hpp"
#include "pmsd/service.hpp"

#include "CLI11.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using pmsd::Json;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw pmsd::Error(pmsd::ErrorCode::Io, "cannot read '" + path + "'", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_result(const pmsd::Project& project, const std::vector<pmsd::ArtifactRef>& refs) {
  const auto& primary = refs.front();
  if (pmsd::artifact_extension(primary.kind) == "json") {
    std::cout << project.read(primary);
    return;
  }
  Json out = Json::array();
  for (const auto& r : refs) out.push_back(pmsd::to_json(r));
  std::cout << out.dump(2) << "\n";
}

pmsd::Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Process mining to system dynamics toolkit"};
  app.require_subcommand(1);
  std::string project_dir = ".";
  app.add_option("-p,--project", project_dir, "Project directory")->capture_default_str();

  Json params = Json::object();
  std::string step;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load an event log CSV");
  std::string log_path, case_col, activity_col, resource_col, complete_col, start_col;
  bool lenient = false;
  ingest->add_option("log", log_path, "Event log CSV")->required()->check(CLI::ExistingFile);
  ingest->add_option("--case", case_col, "Case id column");
  ingest->add_option("--activity", activity_col, "Activity column");
  ingest->add_option("--resource", resource_col, "Resource column");
  ingest->add_option("--complete", complete_col, "Complete timestamp column");
  ingest->add_option("--start", start_col, "Start timestamp column");
  ingest->add_flag("--lenient", lenient, "Skip malformed rows instead of failing");

  app.add_subcommand("summary", "Log statistics");
  app.add_subcommand("dfg", "Directly-follows graph");

  auto* sdlog = app.add_subcommand("sdlog", "Aggregate the log into an SD-log");
  std::string window = "1d", aspect = "general", origin;
  std::vector<std::string> entities;
  std::size_t top_n = 10;
  sdlog->add_option("--window", window, "Window width, e.g. 1h, 7 hours, 1d")->capture_default_str();
  sdlog->add_option("--aspect", aspect, "general, organizational or activity")->capture_default_str();
  sdlog->add_option("--origin", origin, "Window origin timestamp");
  sdlog->add_option("--entities", entities, "Entities to keep (org/activity aspects)")->delimiter(',');
  sdlog->add_option("--top-n", top_n, "Entities kept when none are listed")->capture_default_str();

  auto* windows = app.add_subcommand("windows", "Stability test over candidate windows");
  std::string candidates = "1h,1d", model = "ar_p";
  double split = 0.8;
  bool smooth = false;
  windows->add_option("--candidates", candidates, "Comma-separated windows")->capture_default_str();
  windows->add_option("--model", model, "naive_last, mean, linear_trend or ar")->capture_default_str();
  windows->add_option("--split", split, "Training share")->capture_default_str();
  windows->add_flag("--smooth", smooth, "Smooth series before fitting");

  auto* relations = app.add_subcommand("relations", "Detect lagged relations");
  double threshold = 0.7;
  int max_lag = 5, min_support = 10;
  std::string source_sd = "active";
  relations->add_option("--threshold", threshold)->capture_default_str();
  relations->add_option("--max-lag", max_lag)->capture_default_str();
  relations->add_option("--min-support", min_support)->capture_default_str();
  relations->add_option("--source", source_sd, "SD-log to read: active or all")->capture_default_str();

  auto* detail = app.add_subcommand("detail", "Scatter and fits for one pair");
  std::string d_source, d_target;
  int d_lag = 0;
  detail->add_option("--source", d_source)->required();
  detail->add_option("--target", d_target)->required();
  detail->add_option("--lag", d_lag)->capture_default_str();

  auto* cld = app.add_subcommand("cld", "Build a causal loop diagram from selected relations");
  std::string select_path;
  cld->add_option("--select", select_path, "Selections JSON")->required()->check(CLI::ExistingFile);

  auto* sfd = app.add_subcommand("sfd", "Derive a stock-flow diagram");
  std::string mapping_path;
  sfd->add_option("--mapping", mapping_path, "Element mapping JSON")->required()->check(CLI::ExistingFile);

  auto* fit = app.add_subcommand("fit", "Fit equations to the SD-log");
  std::string exogenous = "replay";
  fit->add_option("--exogenous", exogenous, "replay or hold_mean")->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "Run the fitted model");
  std::optional<std::size_t> horizon;
  sim->add_option("--horizon", horizon, "Steps to simulate (default: SD-log length)");
  sim->add_option("--exogenous", exogenous, "replay or hold_mean")->capture_default_str();

  auto* val = app.add_subcommand("validate", "Compare simulated and real behaviour");
  double tau = 0.2, kappa = 0.3;
  val->add_option("--tau", tau, "MAPE bound")->capture_default_str();
  val->add_option("--kappa", kappa, "KS bound")->capture_default_str();

  auto* serve = app.add_subcommand("serve", "Run the HTTP service; projects live under --project");
  int port = 5000;
  std::string host = "127.0.0.1", ui_dir;
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--ui", ui_dir, "Static UI directory served at /");

  auto* pipeline = app.add_subcommand("pipeline", "Run every step non-interactively");
  std::string p_log, p_selections, p_window = "1d", p_aspect = "general";
  pipeline->add_option("--log", p_log)->required()->check(CLI::ExistingFile);
  pipeline->add_option("--selections", p_selections, "Relations, mapping and options JSON")
      ->required()
      ->check(CLI::ExistingFile);
  pipeline->add_option("--window", p_window)->capture_default_str();
  pipeline->add_option("--aspect", p_aspect)->capture_default_str();
  pipeline->add_option("--origin", origin, "Window origin timestamp");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    auto* sub = app.get_subcommands().front();
    step = sub->get_name();

    if (step == "serve") {
      pmsd::Service service(project_dir, ui_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(ui_dir));
      const int bound = service.bind(host, port);
      std::cerr << "listening on http://" << host << ":" << bound << "\n";
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      service.run();
      g_service = nullptr;
      return 0;
    }

    auto project = pmsd::Project::open(project_dir);

    if (step == "pipeline") {
      pmsd::PipelineRequest req;
      req.log_csv = slurp(p_log);
      req.window = pmsd::parse_window(p_window);
      if (!origin.empty()) {
        auto ts = pmsd::parse_timestamp(origin);
        if (!ts) throw pmsd::Error(pmsd::ErrorCode::BadTimestamp, "bad origin '" + origin + "'", origin);
        req.window.origin = *ts;
      }
      req.aspect.aspect = pmsd::parse_aspect(p_aspect);
      req.selections = Json::parse(slurp(p_selections));
      const auto report = pmsd::full_pipeline(project, req);
      std::cout << pmsd::to_json(report).dump(2) << "\n";
      return 0;
    }

    if (step == "ingest") {
      step = "ingest";
      params["path"] = log_path;
      params["lenient"] = lenient;
      pmsd::ColumnMapping m;
      if (!case_col.empty()) m.case_id = case_col;
      if (!activity_col.empty()) m.activity = activity_col;
      if (!resource_col.empty()) m.resource = resource_col;
      if (!complete_col.empty()) m.complete = complete_col;
      if (!start_col.empty()) m.start = start_col;
      params["mapping"] = pmsd::to_json(m);
    } else if (step == "sdlog") {
      params = {{"window", window}, {"aspect", aspect}, {"top_n", top_n}};
      if (!entities.empty()) params["entities"] = entities;
      if (!origin.empty()) params["origin"] = origin;
    } else if (step == "windows") {
      params = {{"candidates", candidates}, {"model", model}, {"split_ratio", split}, {"smooth", smooth}};
    } else if (step == "relations") {
      params = {{"threshold", threshold}, {"max_lag", max_lag}, {"min_support", min_support}, {"source", source_sd}};
    } else if (step == "detail") {
      params = {{"source", d_source}, {"target", d_target}, {"lag", d_lag}};
    } else if (step == "cld") {
      params = {{"selections", Json::parse(slurp(select_path))}};
    } else if (step == "sfd") {
      params = {{"mapping", Json::parse(slurp(mapping_path))}};
    } else if (step == "fit") {
      params = {{"exogenous", exogenous}};
    } else if (step == "simulate") {
      params = {{"exogenous", exogenous}};
      if (horizon) params["horizon"] = *horizon;
    } else if (step == "validate") {
      params = {{"tau", tau}, {"kappa", kappa}};
    }

    print_result(project, pmsd::run_step(project, step, params));
    return 0;
  } catch (const pmsd::Error& e) {
    std::cerr << "error [" << pmsd::to_string(e.code()) << "]: " << e.what();
    if (!e.detail().empty()) std::cerr << " (" << e.detail() << ")";
    std::cerr << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error [invalid_argument]: bad JSON: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
