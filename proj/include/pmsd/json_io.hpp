#pragma once

#include "pmsd/event_log.hpp"
#include "pmsd/mdl.hpp"
#include "pmsd/model.hpp"
#include "pmsd/relations.hpp"
#include "pmsd/sdlog.hpp"
#include "pmsd/simulation.hpp"
#include "pmsd/validation.hpp"
#include "pmsd/window_select.hpp"

#include "json.hpp"

namespace pmsd {

using Json = nlohmann::json;

// Non-finite numbers serialize as null and read back as +inf.
Json number_or_null(double v);
double number_or_inf(const Json& j);

Json to_json(const ColumnMapping& m);
ColumnMapping column_mapping_from_json(const Json& j);

Json to_json(const LogSummary& s);
Json to_json(const DirectlyFollowsGraph& dfg);

Json to_json(const TimeWindowSpec& w);
TimeWindowSpec window_from_json(const Json& j);
AspectSpec aspect_from_json(const Json& j);

Json to_json(const StabilityReport& r);

Json to_json(const RelationCandidate& c);
RelationCandidate relation_from_json(const Json& j);
Json to_json(const RelationReport& r);
RelationReport relation_report_from_json(const Json& j);
Json to_json(const PairDetail& d);

Json to_json(const CLD& cld);
Json to_json(const SFD& sfd);
Json to_json(const Model& model);
CLD cld_from_json(const Json& j);
SFD sfd_from_json(const Json& j);
Model model_from_json(const Json& j);

Json to_json(const ElementMapping& m);
ElementMapping element_mapping_from_json(const Json& j);

/// A relation picked by the user: identifies a detected candidate.
struct RelationSelection {
  std::string source;
  std::string target;
  int lag = 0;
  std::optional<RelationKind> kind;
};

Json to_json(const RelationSelection& s);
RelationSelection selection_from_json(const Json& j);

/// Resolves selections against detected candidates. Throws EmptySelection,
/// or UnknownRelation naming the first selection with no match.
std::vector<RelationCandidate> resolve_selections(const std::vector<RelationSelection>& selections,
                                                  const RelationReport& detected);

Json to_json(const EquationSet& eqs);
EquationSet equations_from_json(const Json& j);

Json to_json(const ValidationReport& r);
ValidationReport validation_from_json(const Json& j);

}  // namespace pmsd
