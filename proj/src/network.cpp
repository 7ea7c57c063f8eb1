#include "pmuplace/network.hpp"

#include <cmath>
#include <numeric>

namespace pmuplace {

int PowerNetwork::index_of(int original_id) const {
    if (id_index_.empty()) {
        for (int i = 0; i < n_buses; ++i) id_index_.emplace(bus_ids[static_cast<std::size_t>(i)], i);
    }
    auto it = id_index_.find(original_id);
    if (it == id_index_.end()) throw Error("unknown bus id " + std::to_string(original_id));
    return it->second;
}

void PowerNetwork::validate() const {
    if (n_buses <= 0) throw Error("network has no buses");
    if (injections.size() != n_buses) throw Error("injection vector size mismatch");
    if (static_cast<int>(bus_ids.size()) != n_buses) throw Error("bus id map size mismatch");
    if (slack_bus < 0 || slack_bus >= n_buses) throw Error("slack bus out of range");
    for (const Branch& br : branches) {
        if (br.from < 0 || br.from >= n_buses || br.to < 0 || br.to >= n_buses)
            throw Error("branch endpoint out of range");
        if (br.from == br.to) throw Error("branch connects a bus to itself");
        if (!(br.x > 0.0)) throw Error("in-service branch with non-positive reactance");
        if (!(br.tap > 0.0)) throw Error("branch with non-positive tap ratio");
    }
    if (std::abs(injections.sum()) > 1e-9)
        throw Error("injections do not balance after slack adjustment");
}

BMatrix build_b_matrix(const PowerNetwork& net, std::span<const int> removed) {
    BMatrix b = BMatrix::Zero(net.n_buses, net.n_buses);
    std::vector<char> out(net.branches.size(), 0);
    for (int l : removed) out.at(static_cast<std::size_t>(l)) = 1;
    for (std::size_t l = 0; l < net.branches.size(); ++l) {
        if (out[l]) continue;
        const Branch& br = net.branches[l];
        const double w = br.susceptance();
        b(br.from, br.from) += w;
        b(br.to, br.to) += w;
        b(br.from, br.to) -= w;
        b(br.to, br.from) -= w;
    }
    return b;
}

Components connected_components(const PowerNetwork& net, std::span<const int> removed) {
    std::vector<int> parent(static_cast<std::size_t>(net.n_buses));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    std::vector<char> out(net.branches.size(), 0);
    for (int l : removed) out.at(static_cast<std::size_t>(l)) = 1;
    for (std::size_t l = 0; l < net.branches.size(); ++l) {
        if (out[l]) continue;
        const Branch& br = net.branches[l];
        parent[static_cast<std::size_t>(find(br.from))] = find(br.to);
    }
    Components c;
    c.label.assign(static_cast<std::size_t>(net.n_buses), -1);
    for (int i = 0; i < net.n_buses; ++i) {
        const int root = find(i);
        if (c.label[static_cast<std::size_t>(root)] < 0) c.label[static_cast<std::size_t>(root)] = c.count++;
        c.label[static_cast<std::size_t>(i)] = c.label[static_cast<std::size_t>(root)];
    }
    return c;
}

EventSet enumerate_single_line_outages(const PowerNetwork& net) {
    if (connected_components(net).count != 1) throw Error("base network is not connected");
    EventSet events;
    events.push_back(OutageEvent{0, {}});
    int next_id = 1;
    for (int l = 0; l < static_cast<int>(net.branches.size()); ++l) {
        const int one[] = {l};
        if (connected_components(net, one).count == 1)
            events.push_back(OutageEvent{next_id++, {l}});
    }
    return events;
}

}  // namespace pmuplace
