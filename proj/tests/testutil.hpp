#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "pmuplace/instance.hpp"

namespace testutil {

inline std::string data_path(const std::string& name) {
    return std::string(PMUPLACE_DATA_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// baseMVA=100, one branch x=0.1, bus 1 injects 100 MW, bus 2 withdraws it.
inline const char* kTwoBusCase = R"(
function mpc = case2
mpc.version = '2';
mpc.baseMVA = 100;
mpc.bus = [
	1	3	0	0	0	0	1	1	0	135	1	1.05	0.95;
	2	1	100	0	0	0	1	1	0	135	1	1.05	0.95;
];
mpc.gen = [
	1	100	0	10	-10	1	100	1	200	0;
];
mpc.branch = [
	1	2	0.01	0.1	0	250	250	250	0	0	1	-360	360;
];
)";

// Unit-susceptance triangle, P = (1, 0, -1) p.u.
inline const char* kTriangleJson = R"({
  "buses": [
    {"id": 1, "p_injection_pu": 1.0},
    {"id": 2, "p_injection_pu": 0.0},
    {"id": 3, "p_injection_pu": -1.0}
  ],
  "branches": [
    {"from": 1, "to": 2, "x_pu": 1.0},
    {"from": 2, "to": 3, "x_pu": 1.0},
    {"from": 1, "to": 3, "x_pu": 1.0}
  ],
  "slack": 1
})";

inline pmuplace::PowerNetwork two_bus() {
    return pmuplace::parse_matpower_case(kTwoBusCase);
}

inline pmuplace::PowerNetwork triangle() {
    return pmuplace::parse_native_network(kTriangleJson);
}

// Independent bridge oracle (DFS lowlink), used to cross-check event
// enumeration without going through connected_components.
inline std::vector<int> find_bridges(const pmuplace::PowerNetwork& net) {
    const int n = net.n_buses;
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(n));
    for (int l = 0; l < static_cast<int>(net.branches.size()); ++l) {
        const auto& br = net.branches[static_cast<std::size_t>(l)];
        adj[static_cast<std::size_t>(br.from)].push_back({br.to, l});
        adj[static_cast<std::size_t>(br.to)].push_back({br.from, l});
    }
    std::vector<int> disc(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
    std::vector<int> bridges;
    int timer = 0;
    auto dfs = [&](auto&& self, int u, int via_branch) -> void {
        disc[static_cast<std::size_t>(u)] = low[static_cast<std::size_t>(u)] = timer++;
        for (auto [v, l] : adj[static_cast<std::size_t>(u)]) {
            if (l == via_branch) continue;
            if (disc[static_cast<std::size_t>(v)] < 0) {
                self(self, v, l);
                low[static_cast<std::size_t>(u)] =
                    std::min(low[static_cast<std::size_t>(u)], low[static_cast<std::size_t>(v)]);
                if (low[static_cast<std::size_t>(v)] > disc[static_cast<std::size_t>(u)])
                    bridges.push_back(l);
            } else {
                low[static_cast<std::size_t>(u)] =
                    std::min(low[static_cast<std::size_t>(u)], disc[static_cast<std::size_t>(v)]);
            }
        }
    };
    dfs(dfs, 0, -1);
    std::sort(bridges.begin(), bridges.end());
    return bridges;
}

}  // namespace testutil
