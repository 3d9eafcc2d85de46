#pragma once

#include "pmsd/model.hpp"

#include <string>
#include <string_view>
#include <variant>

namespace pmsd {

using Model = std::variant<CLD, SFD>;

struct MdlOptions {
  int final_time = 100;
};

/// Equation-only Vensim text: `{UTF-8}` header, one block per element,
/// control section, no sketch. CLD nodes read `x = A FUNCTION OF( a, -b )`,
/// stocks `S = INTEG( in - out , init )`, constants `c = value`, other SFD
/// elements `A FUNCTION OF` their link sources. The comment field carries the
/// element role and its incoming links with lag (and strength for CLDs), so
/// that lags never become DELAY functions.
std::string export_mdl(const CLD& cld, const MdlOptions& options = {});
std::string export_mdl(const SFD& sfd, const MdlOptions& options = {});
std::string export_mdl(const Model& model, const MdlOptions& options = {});

/// Reads the profile written by export_mdl. Foreign files load on a best
/// effort basis; anything outside INTEG, A FUNCTION OF and numeric constants
/// throws UnsupportedConstruct with the line number.
Model parse_mdl(std::string_view text);

}  // namespace pmsd
