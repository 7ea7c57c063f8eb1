#pragma once

#include <iosfwd>

#include "pmuplace/network.hpp"

namespace pmuplace {

class IslandingUnsupported : public Error {
  public:
    using Error::Error;
};

class SingularSystem : public Error {
  public:
    using Error::Error;
};

// Post-event stabilized angle vectors, one per event, all pinned so that
// entry ref_bus is exactly zero.
struct SignatureSet {
    int ref_bus = 0;                       // internal index
    std::vector<int> event_ids;            // aligned with angles
    std::vector<Eigen::VectorXd> angles;   // radians, length n_buses each

    int n_events() const { return static_cast<int>(angles.size()); }
    int n_buses() const { return angles.empty() ? 0 : static_cast<int>(angles.front().size()); }
};

// DC power flow solve with angle pinned at ref_bus: returns theta with
// theta[ref_bus] == 0 and B(removed) * theta == P. Throws
// IslandingUnsupported when the post-outage network is disconnected.
Eigen::VectorXd solve_dc_angles(const PowerNetwork& net, std::span<const int> removed, int ref_bus);

SignatureSet compute_signature_set(const PowerNetwork& net, const EventSet& events, int ref_bus);

// Shift every vector so its entry at new_ref becomes exactly zero.
SignatureSet repin(const SignatureSet& sigs, int new_ref);

// Event pairs whose signatures coincide everywhere within tol (radians,
// infinity norm). These collapse to zero columns in the distance matrix.
std::vector<std::pair<int, int>> find_signature_collisions(const SignatureSet& sigs,
                                                           double tol = 1e-12);

// CSV dump: header `event_id,bus_<id>,...`, 12 significant digits.
void write_signature_csv(std::ostream& out, const SignatureSet& sigs, const PowerNetwork& net);

}  // namespace pmuplace
