#include "pmsd/model.hpp"

#include "pmsd/error.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <tuple>

namespace pmsd {

namespace {

template <typename Edge>
bool edge_less(const Edge& a, const Edge& b) {
  return std::tie(a.source, a.target, a.lag) < std::tie(b.source, b.target, b.lag);
}

}  // namespace

CLD build_cld(const std::vector<RelationCandidate>& selected) {
  if (selected.empty()) throw Error(ErrorCode::EmptySelection, "no relations selected");

  std::map<std::tuple<std::string, std::string, int>, CldEdge> edges;
  std::set<std::string> nodes;
  for (const auto& r : selected) {
    nodes.insert(r.source);
    nodes.insert(r.target);
    CldEdge e{r.source, r.target, r.polarity, r.lag, r.strength, r.kind};
    auto [it, inserted] = edges.try_emplace({r.source, r.target, r.lag}, e);
    if (!inserted && r.strength > it->second.strength) it->second = e;
  }

  CLD cld;
  cld.nodes.assign(nodes.begin(), nodes.end());
  for (auto& [key, e] : edges) cld.edges.push_back(std::move(e));
  check_cld(cld);
  return cld;
}

void check_cld(const CLD& cld) {
  const std::set<std::string> nodes(cld.nodes.begin(), cld.nodes.end());
  if (nodes.size() != cld.nodes.size()) throw Error(ErrorCode::InvalidArgument, "duplicate CLD node");
  std::set<std::tuple<std::string, std::string, int>> seen;
  for (const auto& e : cld.edges) {
    if (!nodes.count(e.source) || !nodes.count(e.target)) {
      throw Error(ErrorCode::InvalidArgument, "CLD edge " + e.source + " -> " + e.target + " has an undeclared endpoint");
    }
    if (e.lag < 0) throw Error(ErrorCode::InvalidArgument, "CLD edge lag must be >= 0");
    if (!(e.strength >= 0.0 && e.strength <= 1.0)) throw Error(ErrorCode::InvalidArgument, "CLD edge strength outside [0,1]");
    if (!seen.insert({e.source, e.target, e.lag}).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate CLD edge " + e.source + " -> " + e.target);
    }
  }
}

std::string_view to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::stock: return "stock";
    case ElementKind::flow: return "flow";
    case ElementKind::auxiliary: return "auxiliary";
    case ElementKind::constant: return "constant";
  }
  return "auxiliary";
}

ElementKind parse_element_kind(std::string_view text) {
  if (text == "stock") return ElementKind::stock;
  if (text == "flow") return ElementKind::flow;
  if (text == "auxiliary" || text == "aux" || text == "variable") return ElementKind::auxiliary;
  if (text == "constant") return ElementKind::constant;
  throw Error(ErrorCode::InvalidArgument, "unknown element kind '" + std::string(text) + "'");
}

std::optional<ElementKind> SFD::kind_of(std::string_view name) const {
  for (const auto& s : stocks) {
    if (s.name == name) return ElementKind::stock;
  }
  for (const auto& f : flows) {
    if (f.name == name) return ElementKind::flow;
  }
  for (const auto& a : auxiliaries) {
    if (a == name) return ElementKind::auxiliary;
  }
  for (const auto& c : constants) {
    if (c.name == name) return ElementKind::constant;
  }
  return std::nullopt;
}

std::vector<std::string> SFD::element_names() const {
  std::vector<std::string> out;
  for (const auto& s : stocks) out.push_back(s.name);
  for (const auto& f : flows) out.push_back(f.name);
  out.insert(out.end(), auxiliaries.begin(), auxiliaries.end());
  for (const auto& c : constants) out.push_back(c.name);
  return out;
}

const Stock* SFD::find_stock(std::string_view name) const {
  for (const auto& s : stocks) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const Constant* SFD::find_constant(std::string_view name) const {
  for (const auto& c : constants) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

void canonicalize(SFD& sfd) {
  auto by_name = [](const auto& a, const auto& b) { return a.name < b.name; };
  std::sort(sfd.stocks.begin(), sfd.stocks.end(), by_name);
  std::sort(sfd.flows.begin(), sfd.flows.end(), by_name);
  std::sort(sfd.auxiliaries.begin(), sfd.auxiliaries.end());
  std::sort(sfd.constants.begin(), sfd.constants.end(), by_name);
  std::sort(sfd.links.begin(), sfd.links.end(), edge_less<Link>);
}

void check_sfd(const SFD& sfd) {
  const auto names = sfd.element_names();
  std::set<std::string> unique;
  for (const auto& n : names) {
    if (n.empty()) throw Error(ErrorCode::InvalidArgument, "element with empty name");
    if (!unique.insert(n).second) throw Error(ErrorCode::InvalidArgument, "element name '" + n + "' declared twice", n);
  }

  for (const auto& f : sfd.flows) {
    if (!f.inflow_to && !f.outflow_from) {
      throw Error(ErrorCode::FlowWithoutStock, "flow '" + f.name + "' is not attached to any stock", f.name);
    }
    for (const auto* att : {&f.inflow_to, &f.outflow_from}) {
      if (*att && !sfd.find_stock(**att)) {
        throw Error(ErrorCode::UnknownAttachment, "flow '" + f.name + "' is attached to '" + **att + "', which is not a stock",
                    **att);
      }
    }
  }

  std::set<std::tuple<std::string, std::string, int>> seen;
  for (const auto& l : sfd.links) {
    if (!unique.count(l.source) || !unique.count(l.target)) {
      throw Error(ErrorCode::InvalidArgument, "link " + l.source + " -> " + l.target + " has an undeclared endpoint");
    }
    if (l.lag < 0) throw Error(ErrorCode::InvalidArgument, "link lag must be >= 0");
    if (!seen.insert({l.source, l.target, l.lag}).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate link " + l.source + " -> " + l.target);
    }
  }

  // Lag-0 dependencies among non-stock elements must be acyclic.
  std::map<std::string, std::vector<std::string>> next;
  for (const auto& l : sfd.links) {
    if (l.lag != 0) continue;
    if (sfd.find_stock(l.source) || sfd.find_stock(l.target)) continue;
    next[l.source].push_back(l.target);
  }
  std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
  std::vector<std::string> path;
  std::function<void(const std::string&)> visit = [&](const std::string& node) {
    state[node] = 1;
    path.push_back(node);
    for (const auto& succ : next[node]) {
      if (state[succ] == 1) {
        auto from = std::find(path.begin(), path.end(), succ);
        std::string cycle;
        for (auto it = from; it != path.end(); ++it) cycle += *it + " -> ";
        cycle += succ;
        throw Error(ErrorCode::Lag0AlgebraicCycle, "lag-0 algebraic cycle: " + cycle, cycle);
      }
      if (state[succ] == 0) visit(succ);
    }
    path.pop_back();
    state[node] = 2;
  };
  for (const auto& n : names) {
    if (state[n] == 0) visit(n);
  }
}

SFD derive_sfd(const CLD& cld, const ElementMapping& mapping) {
  check_cld(cld);
  const std::set<std::string> nodes(cld.nodes.begin(), cld.nodes.end());
  for (const auto& [name, m] : mapping) {
    if (!nodes.count(name)) {
      throw Error(ErrorCode::UnknownVariable, "mapping names '" + name + "', which is not a CLD node", name);
    }
  }

  SFD sfd;
  for (const auto& node : cld.nodes) {
    auto it = mapping.find(node);
    const NodeMapping m = it == mapping.end() ? NodeMapping{} : it->second;
    if (m.kind != ElementKind::flow && (m.inflow_to || m.outflow_from)) {
      throw Error(ErrorCode::InvalidArgument, "only flows take stock attachments ('" + node + "')", node);
    }
    switch (m.kind) {
      case ElementKind::stock:
        sfd.stocks.push_back({node, m.initial_value});
        break;
      case ElementKind::flow:
        sfd.flows.push_back({node, m.inflow_to, m.outflow_from});
        break;
      case ElementKind::auxiliary:
        sfd.auxiliaries.push_back(node);
        break;
      case ElementKind::constant:
        sfd.constants.push_back({node, m.value});
        break;
    }
  }
  for (const auto& e : cld.edges) sfd.links.push_back({e.source, e.target, e.polarity, e.lag, e.kind});

  canonicalize(sfd);
  check_sfd(sfd);
  return sfd;
}

}  // namespace pmsd
