#pragma once

#include <Eigen/Dense>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace pmuplace {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Raised by the case-file parsers; line is 1-based, 0 when not applicable.
class ParseError : public Error {
  public:
    ParseError(const std::string& msg, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

struct Branch {
    int from = 0;        // internal 0-based bus index
    int to = 0;
    double x = 0.0;      // series reactance, p.u.
    double tap = 1.0;    // off-nominal turns ratio, 1 when unset
    double susceptance() const { return 1.0 / (x * tap); }
};

// A transmission network normalized for DC studies: contiguous 0-based bus
// indices (original ids retained), in-service branches only, per-unit
// injections balanced so they sum to ~0 (mismatch absorbed at the slack bus).
struct PowerNetwork {
    int n_buses = 0;
    std::vector<Branch> branches;
    Eigen::VectorXd injections;   // p.u., length n_buses
    int slack_bus = 0;            // internal index
    double base_mva = 100.0;
    std::vector<int> bus_ids;     // internal index -> original id

    int id_of(int internal) const { return bus_ids.at(static_cast<std::size_t>(internal)); }
    int index_of(int original_id) const;
    void validate() const;        // checks the type invariants, throws Error

  private:
    mutable std::unordered_map<int, int> id_index_;
};

// Outage event: set of removed branch indices, empty exactly for the
// non-outage event (id 0).
struct OutageEvent {
    int id = 0;
    std::vector<int> removed_branches;
};

using EventSet = std::vector<OutageEvent>;
using BMatrix = Eigen::MatrixXd;

// Weighted-Laplacian susceptance matrix for the network with the given
// branches removed. Branch weight is 1/(x*tap); parallel branches accumulate.
// Every row sums to zero.
BMatrix build_b_matrix(const PowerNetwork& net, std::span<const int> removed = {});

struct Components {
    int count = 0;
    std::vector<int> label;  // bus -> component id (0-based)
};

Components connected_components(const PowerNetwork& net, std::span<const int> removed = {});

// E0 plus one event per in-service branch whose removal keeps the network
// connected (bridges excluded). Parallel branches stay distinct events.
EventSet enumerate_single_line_outages(const PowerNetwork& net);

}  // namespace pmuplace
