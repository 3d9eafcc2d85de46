#pragma once

#include "pmsd/relations.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pmsd {

// ---------------------------------------------------------------------------
// Causal-loop diagram

struct CldEdge {
  std::string source;
  std::string target;
  Polarity polarity = Polarity::positive;
  int lag = 0;
  double strength = 1.0;
  RelationKind kind = RelationKind::linear;

  bool operator==(const CldEdge&) const = default;
};

struct CLD {
  std::vector<std::string> nodes;  // sorted
  std::vector<CldEdge> edges;      // sorted by (source, target, lag)

  bool operator==(const CLD&) const = default;
};

/// Nodes = union of endpoints. Duplicate (source, target, lag) collapse to
/// the strongest one. Throws EmptySelection.
CLD build_cld(const std::vector<RelationCandidate>& selected);

/// Throws InvalidArgument on dangling endpoints, duplicates or bad strength.
void check_cld(const CLD& cld);

// ---------------------------------------------------------------------------
// Stock-flow diagram

enum class ElementKind { stock, flow, auxiliary, constant };

std::string_view to_string(ElementKind kind);
ElementKind parse_element_kind(std::string_view text);

struct Stock {
  std::string name;
  double initial_value = 0.0;
  bool operator==(const Stock&) const = default;
};

struct Flow {
  std::string name;
  std::optional<std::string> inflow_to;
  std::optional<std::string> outflow_from;
  bool operator==(const Flow&) const = default;
};

struct Constant {
  std::string name;
  double value = 0.0;
  bool operator==(const Constant&) const = default;
};

struct Link {
  std::string source;
  std::string target;
  Polarity polarity = Polarity::positive;
  int lag = 0;
  RelationKind kind = RelationKind::linear;
  bool operator==(const Link&) const = default;
};

struct SFD {
  std::vector<Stock> stocks;
  std::vector<Flow> flows;
  std::vector<std::string> auxiliaries;
  std::vector<Constant> constants;
  std::vector<Link> links;

  std::optional<ElementKind> kind_of(std::string_view name) const;
  /// stocks, flows, auxiliaries, constants; each alphabetical after canonicalize().
  std::vector<std::string> element_names() const;
  const Stock* find_stock(std::string_view name) const;
  const Constant* find_constant(std::string_view name) const;

  bool operator==(const SFD&) const = default;
};

/// Sorts every list into canonical order.
void canonicalize(SFD& sfd);

/// Element names unique, flows attached to declared stocks, link endpoints
/// declared, lag-0 links among non-stock elements acyclic. Throws
/// FlowWithoutStock, UnknownAttachment, Lag0AlgebraicCycle or InvalidArgument.
void check_sfd(const SFD& sfd);

struct NodeMapping {
  ElementKind kind = ElementKind::auxiliary;
  std::optional<std::string> inflow_to;
  std::optional<std::string> outflow_from;
  double initial_value = 0.0;  // stocks
  double value = 0.0;          // constants
};

/// CLD node -> element role. Unmapped nodes become auxiliaries.
using ElementMapping = std::map<std::string, NodeMapping>;

SFD derive_sfd(const CLD& cld, const ElementMapping& mapping);

}  // namespace pmsd
