#include "pmsd/json_io.hpp"

#include "pmsd/error.hpp"

#include <cmath>
#include <limits>

namespace pmsd {

namespace {

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

std::optional<std::string> opt_string(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

Json opt_to_json(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }
Json opt_to_json(const std::optional<double>& v) { return v ? number_or_null(*v) : Json(nullptr); }

const Json& require(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::InvalidArgument, std::string("missing JSON field '") + key + "'", key);
  return *it;
}

}  // namespace

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_or_inf(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

Json to_json(const ColumnMapping& m) {
  return {{"case", m.case_id}, {"activity", m.activity}, {"resource", m.resource}, {"complete", m.complete},
          {"start", m.start}};
}

ColumnMapping column_mapping_from_json(const Json& j) {
  ColumnMapping m;
  m.case_id = get_or<std::string>(j, "case", m.case_id);
  m.activity = get_or<std::string>(j, "activity", m.activity);
  m.resource = get_or<std::string>(j, "resource", m.resource);
  m.complete = get_or<std::string>(j, "complete", m.complete);
  m.start = get_or<std::string>(j, "start", m.start);
  return m;
}

Json to_json(const LogSummary& s) {
  return {{"num_events", s.num_events},
          {"num_cases", s.num_cases},
          {"num_activities", s.num_activities},
          {"num_resources", s.num_resources},
          {"first_start", format_timestamp(s.first_start)},
          {"last_complete", format_timestamp(s.last_complete)},
          {"avg_events_per_case", s.avg_events_per_case},
          {"avg_case_duration_minutes", s.avg_case_duration_minutes}};
}

Json to_json(const DirectlyFollowsGraph& dfg) {
  Json edges = Json::array();
  for (const auto& [pair, n] : dfg.edges) edges.push_back({{"source", pair.first}, {"target", pair.second}, {"count", n}});
  return {{"edges", edges}, {"start_activities", dfg.start_activities}, {"end_activities", dfg.end_activities}};
}

Json to_json(const TimeWindowSpec& w) {
  Json j = {{"duration", w.duration}, {"label", window_label(w)}};
  switch (w.unit) {
    case TimeUnit::minute: j["unit"] = "minute"; break;
    case TimeUnit::hour: j["unit"] = "hour"; break;
    case TimeUnit::day: j["unit"] = "day"; break;
    case TimeUnit::week: j["unit"] = "week"; break;
  }
  j["origin"] = w.origin ? Json(format_timestamp(*w.origin)) : Json(nullptr);
  return j;
}

TimeWindowSpec window_from_json(const Json& j) {
  TimeWindowSpec w;
  if (j.is_string()) return parse_window(j.get<std::string>());
  if (auto it = j.find("window"); it != j.end() && it->is_string()) {
    w = parse_window(it->get<std::string>());
  } else {
    w = parse_window(std::to_string(require(j, "duration").get<int>()) + require(j, "unit").get<std::string>());
  }
  if (auto origin = opt_string(j, "origin")) {
    auto ts = parse_timestamp(*origin);
    if (!ts) throw Error(ErrorCode::BadTimestamp, "bad window origin '" + *origin + "'", *origin);
    w.origin = *ts;
  }
  return w;
}

AspectSpec aspect_from_json(const Json& j) {
  AspectSpec a;
  if (j.is_string()) {
    a.aspect = parse_aspect(j.get<std::string>());
    return a;
  }
  a.aspect = parse_aspect(get_or<std::string>(j, "aspect", "general"));
  if (auto it = j.find("entities"); it != j.end() && !it->is_null()) a.entities = it->get<std::vector<std::string>>();
  a.top_n = get_or<std::size_t>(j, "top_n", a.top_n);
  return a;
}

Json to_json(const StabilityReport& r) {
  Json cands = Json::array();
  for (const auto& c : r.candidates) {
    Json per = Json::object();
    for (const auto& [name, e] : c.per_variable) {
      per[name] = {{"rmse", number_or_null(e.rmse)},
                   {"mape", number_or_null(e.mape)},
                   {"mape_skipped", e.mape_skipped},
                   {"fell_back", e.fell_back}};
    }
    cands.push_back({{"label", c.label},
                     {"window", to_json(c.spec)},
                     {"k", c.k},
                     {"total_steps", c.total_steps},
                     {"active_fraction", c.active_fraction},
                     {"per_variable", per},
                     {"aggregate_score", number_or_null(c.aggregate_score)},
                     {"viable", c.viable},
                     {"insufficient_data", !c.viable}});
  }
  Json j = {{"model", std::string(to_string(r.model))}, {"split_ratio", r.split_ratio}, {"candidates", cands}};
  bool any_viable = false;
  for (const auto& c : r.candidates) any_viable = any_viable || c.viable;
  j["ranking"] = any_viable ? Json(rank_windows(r)) : Json::array();
  return j;
}

Json to_json(const RelationCandidate& c) {
  return {{"source", c.source},       {"target", c.target},
          {"lag", c.lag},             {"kind", std::string(to_string(c.kind))},
          {"coefficient", c.coefficient}, {"polarity", std::string(to_string(c.polarity))},
          {"strength", c.strength},   {"support", c.support},
          {"auto", c.auto_relation}};
}

RelationCandidate relation_from_json(const Json& j) {
  RelationCandidate c;
  c.source = require(j, "source").get<std::string>();
  c.target = require(j, "target").get<std::string>();
  c.lag = get_or<int>(j, "lag", 0);
  c.kind = parse_relation_kind(get_or<std::string>(j, "kind", "linear"));
  c.coefficient = get_or<double>(j, "coefficient", 1.0);
  c.polarity = j.contains("polarity") ? parse_polarity(j["polarity"].get<std::string>()) : polarity_of(c.coefficient);
  c.strength = get_or<double>(j, "strength", std::abs(c.coefficient));
  c.support = get_or<std::size_t>(j, "support", 0);
  c.auto_relation = get_or<bool>(j, "auto", c.source == c.target);
  return c;
}

Json to_json(const RelationReport& r) {
  Json cands = Json::array();
  for (const auto& c : r.candidates) cands.push_back(to_json(c));
  return {{"skipped_constant", r.skipped_constant}, {"candidates", cands}};
}

RelationReport relation_report_from_json(const Json& j) {
  RelationReport r;
  r.skipped_constant = get_or<std::vector<std::string>>(j, "skipped_constant", {});
  for (const auto& c : require(j, "candidates")) r.candidates.push_back(relation_from_json(c));
  return r;
}

Json to_json(const PairDetail& d) {
  Json points = Json::array();
  for (const auto& [x, y] : d.points) points.push_back({x, y});
  return {{"source", d.source},
          {"target", d.target},
          {"lag", d.lag},
          {"support", d.points.size()},
          {"pearson", opt_to_json(d.pearson)},
          {"spearman", opt_to_json(d.spearman)},
          {"fits",
           {{"linear", {{"slope", d.linear.slope}, {"intercept", d.linear.intercept}, {"r2", d.linear.r2}}},
            {"quadratic",
             {{"a", d.quadratic.a}, {"b", d.quadratic.b}, {"c", d.quadratic.c}, {"r2", d.quadratic.r2}}}}},
          {"points", points}};
}

Json to_json(const CLD& cld) {
  Json edges = Json::array();
  for (const auto& e : cld.edges) {
    edges.push_back({{"source", e.source},
                     {"target", e.target},
                     {"polarity", std::string(to_string(e.polarity))},
                     {"lag", e.lag},
                     {"strength", e.strength},
                     {"kind", std::string(to_string(e.kind))}});
  }
  return {{"kind", "cld"}, {"nodes", cld.nodes}, {"edges", edges}};
}

Json to_json(const SFD& sfd) {
  Json stocks = Json::array(), flows = Json::array(), constants = Json::array(), links = Json::array();
  for (const auto& s : sfd.stocks) stocks.push_back({{"name", s.name}, {"initial_value", s.initial_value}});
  for (const auto& f : sfd.flows) {
    flows.push_back({{"name", f.name}, {"inflow_to", opt_to_json(f.inflow_to)}, {"outflow_from", opt_to_json(f.outflow_from)}});
  }
  for (const auto& c : sfd.constants) constants.push_back({{"name", c.name}, {"value", c.value}});
  for (const auto& l : sfd.links) {
    links.push_back({{"source", l.source},
                     {"target", l.target},
                     {"polarity", std::string(to_string(l.polarity))},
                     {"lag", l.lag},
                     {"kind", std::string(to_string(l.kind))}});
  }
  return {{"kind", "sfd"},       {"stocks", stocks},       {"flows", flows},
          {"auxiliaries", sfd.auxiliaries}, {"constants", constants}, {"links", links}};
}

Json to_json(const Model& model) {
  return std::visit([](const auto& m) { return to_json(m); }, model);
}

CLD cld_from_json(const Json& j) {
  CLD cld;
  cld.nodes = require(j, "nodes").get<std::vector<std::string>>();
  for (const auto& e : require(j, "edges")) {
    cld.edges.push_back({require(e, "source").get<std::string>(), require(e, "target").get<std::string>(),
                         parse_polarity(get_or<std::string>(e, "polarity", "+")), get_or<int>(e, "lag", 0),
                         get_or<double>(e, "strength", 1.0),
                         parse_relation_kind(get_or<std::string>(e, "kind", "linear"))});
  }
  check_cld(cld);
  return cld;
}

SFD sfd_from_json(const Json& j) {
  SFD sfd;
  for (const auto& s : get_or<Json>(j, "stocks", Json::array())) {
    sfd.stocks.push_back({require(s, "name").get<std::string>(), get_or<double>(s, "initial_value", 0.0)});
  }
  for (const auto& f : get_or<Json>(j, "flows", Json::array())) {
    sfd.flows.push_back({require(f, "name").get<std::string>(), opt_string(f, "inflow_to"), opt_string(f, "outflow_from")});
  }
  sfd.auxiliaries = get_or<std::vector<std::string>>(j, "auxiliaries", {});
  for (const auto& c : get_or<Json>(j, "constants", Json::array())) {
    sfd.constants.push_back({require(c, "name").get<std::string>(), get_or<double>(c, "value", 0.0)});
  }
  for (const auto& l : get_or<Json>(j, "links", Json::array())) {
    sfd.links.push_back({require(l, "source").get<std::string>(), require(l, "target").get<std::string>(),
                         parse_polarity(get_or<std::string>(l, "polarity", "+")), get_or<int>(l, "lag", 0),
                         parse_relation_kind(get_or<std::string>(l, "kind", "linear"))});
  }
  canonicalize(sfd);
  check_sfd(sfd);
  return sfd;
}

Model model_from_json(const Json& j) {
  const auto kind = require(j, "kind").get<std::string>();
  if (kind == "cld") return cld_from_json(j);
  if (kind == "sfd") return sfd_from_json(j);
  throw Error(ErrorCode::InvalidArgument, "model kind must be 'cld' or 'sfd'");
}

Json to_json(const ElementMapping& m) {
  Json j = Json::object();
  for (const auto& [name, n] : m) {
    Json e = {{"kind", std::string(to_string(n.kind))}};
    if (n.inflow_to) e["inflow_to"] = *n.inflow_to;
    if (n.outflow_from) e["outflow_from"] = *n.outflow_from;
    if (n.kind == ElementKind::stock) e["initial_value"] = n.initial_value;
    if (n.kind == ElementKind::constant) e["value"] = n.value;
    j[name] = e;
  }
  return j;
}

ElementMapping element_mapping_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "element mapping must be a JSON object");
  ElementMapping m;
  for (const auto& [name, e] : j.items()) {
    NodeMapping n;
    if (e.is_string()) {
      n.kind = parse_element_kind(e.get<std::string>());
    } else {
      n.kind = parse_element_kind(get_or<std::string>(e, "kind", "auxiliary"));
      n.inflow_to = opt_string(e, "inflow_to");
      n.outflow_from = opt_string(e, "outflow_from");
      n.initial_value = get_or<double>(e, "initial_value", 0.0);
      n.value = get_or<double>(e, "value", 0.0);
    }
    m[name] = n;
  }
  return m;
}

Json to_json(const RelationSelection& s) {
  Json j = {{"source", s.source}, {"target", s.target}, {"lag", s.lag}};
  if (s.kind) j["kind"] = std::string(to_string(*s.kind));
  return j;
}

RelationSelection selection_from_json(const Json& j) {
  RelationSelection s;
  s.source = require(j, "source").get<std::string>();
  s.target = require(j, "target").get<std::string>();
  s.lag = get_or<int>(j, "lag", 0);
  if (auto kind = opt_string(j, "kind")) s.kind = parse_relation_kind(*kind);
  return s;
}

std::vector<RelationCandidate> resolve_selections(const std::vector<RelationSelection>& selections,
                                                  const RelationReport& detected) {
  if (selections.empty()) throw Error(ErrorCode::EmptySelection, "no relations selected");
  std::vector<RelationCandidate> out;
  for (const auto& s : selections) {
    auto it = std::find_if(detected.candidates.begin(), detected.candidates.end(), [&](const RelationCandidate& c) {
      return c.source == s.source && c.target == s.target && c.lag == s.lag && (!s.kind || *s.kind == c.kind);
    });
    if (it == detected.candidates.end()) {
      const std::string what = s.source + " -> " + s.target + " (lag " + std::to_string(s.lag) + ")";
      throw Error(ErrorCode::UnknownRelation, "unknown relation " + what, what);
    }
    out.push_back(*it);
  }
  return out;
}

Json to_json(const EquationSet& eqs) {
  Json j = Json::object();
  for (const auto& [name, eq] : eqs) {
    Json e;
    if (const auto* lin = std::get_if<LinearForm>(&eq.form)) {
      Json terms = Json::array();
      for (const auto& t : lin->terms) {
        terms.push_back({{"input", t.input}, {"lag", t.lag}, {"coefficient", t.coefficient}, {"squared", t.squared}});
      }
      e = {{"type", "linear_form"}, {"intercept", lin->intercept}, {"terms", terms}};
    } else if (const auto* rep = std::get_if<Replay>(&eq.form)) {
      e = {{"type", "replay"}, {"variable", rep->variable}};
    } else {
      e = {{"type", "constant"}, {"value", std::get<ConstantValue>(eq.form).value}};
    }
    e["fallback"] = eq.fallback;
    j[name] = e;
  }
  return j;
}

EquationSet equations_from_json(const Json& j) {
  EquationSet eqs;
  for (const auto& [name, e] : j.items()) {
    Equation eq;
    eq.fallback = get_or<bool>(e, "fallback", false);
    const auto type = require(e, "type").get<std::string>();
    if (type == "linear_form") {
      LinearForm lin;
      lin.intercept = get_or<double>(e, "intercept", 0.0);
      for (const auto& t : require(e, "terms")) {
        lin.terms.push_back({require(t, "input").get<std::string>(), get_or<int>(t, "lag", 0),
                             require(t, "coefficient").get<double>(), get_or<bool>(t, "squared", false)});
      }
      eq.form = std::move(lin);
    } else if (type == "replay") {
      eq.form = Replay{get_or<std::string>(e, "variable", name)};
    } else if (type == "constant") {
      eq.form = ConstantValue{require(e, "value").get<double>()};
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown equation type '" + type + "'");
    }
    eqs[name] = std::move(eq);
  }
  return eqs;
}

Json to_json(const ValidationReport& r) {
  Json vars = Json::array();
  for (const auto& v : r.variables) {
    vars.push_back({{"name", v.name},
                    {"rmse", number_or_null(v.rmse)},
                    {"mape", number_or_null(v.mape)},
                    {"mape_skipped", v.mape_skipped},
                    {"mean_real", v.mean_real},
                    {"mean_sim", v.mean_sim},
                    {"std_real", v.std_real},
                    {"std_sim", v.std_sim},
                    {"ks_statistic", v.ks_statistic},
                    {"verdict", v.pass ? "pass" : "fail"}});
  }
  return {{"tau", r.thresholds.mape_max},
          {"kappa", r.thresholds.ks_max},
          {"aligned_steps", r.aligned_steps},
          {"variables", vars}};
}

ValidationReport validation_from_json(const Json& j) {
  ValidationReport r;
  r.thresholds.mape_max = get_or<double>(j, "tau", 0.2);
  r.thresholds.ks_max = get_or<double>(j, "kappa", 0.3);
  r.aligned_steps = get_or<std::size_t>(j, "aligned_steps", 0);
  for (const auto& v : require(j, "variables")) {
    VariableValidation out;
    out.name = require(v, "name").get<std::string>();
    out.rmse = number_or_inf(require(v, "rmse"));
    out.mape = number_or_inf(require(v, "mape"));
    out.mape_skipped = get_or<std::size_t>(v, "mape_skipped", 0);
    out.mean_real = get_or<double>(v, "mean_real", 0.0);
    out.mean_sim = get_or<double>(v, "mean_sim", 0.0);
    out.std_real = get_or<double>(v, "std_real", 0.0);
    out.std_sim = get_or<double>(v, "std_sim", 0.0);
    out.ks_statistic = get_or<double>(v, "ks_statistic", 0.0);
    out.pass = get_or<std::string>(v, "verdict", "fail") == "pass";
    r.variables.push_back(std::move(out));
  }
  return r;
}

}  // namespace pmsd
