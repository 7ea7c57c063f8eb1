#pragma once

#include <string_view>

#include "pmuplace/network.hpp"

namespace pmuplace {

// MATPOWER case text (format version 1 or 2). Reads the baseMVA, bus, gen
// and branch blocks; columns used: bus (id, type, Pd), gen (bus, Pg, status),
// branch (fbus, tbus, x, ratio, status). Everything else is ignored.
PowerNetwork parse_matpower_case(std::string_view text);

// Native JSON network:
//   {"buses": [{"id": 1, "p_injection_pu": 0.5}, ...],
//    "branches": [{"from": 1, "to": 2, "x_pu": 0.1, "tap": 1.0, "status": 1}, ...],
//    "slack": 1}
PowerNetwork parse_native_network(std::string_view text);

enum class CaseFormat { kMatpower, kNative };

PowerNetwork load_network(const std::string& path, CaseFormat format);

}  // namespace pmuplace
