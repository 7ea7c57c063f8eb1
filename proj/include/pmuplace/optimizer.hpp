#pragma once

#include <functional>
#include <iosfwd>
#include <optional>

#include "pmuplace/separation.hpp"
#include "pmuplace/simplex.hpp"

namespace pmuplace {

class InfeasibleConstraints : public Error {
  public:
    using Error::Error;
};

class EnumerationCapExceeded : public Error {
  public:
    using Error::Error;
};

// Buses whose selection indicator is pre-determined. fixed_one always
// contains the reference bus. creation_index orders leaves for the
// branch-and-bound tie-break.
struct ConstraintSet {
    std::vector<int> fixed_one;   // sorted
    std::vector<int> fixed_zero;  // sorted
    long creation_index = 0;

    static ConstraintSet root(int ref_bus);
    ConstraintSet child_with_one(int bus, long creation) const;
    ConstraintSet child_with_zero(int bus, long creation) const;
    bool feasible_for(int m, int n_buses) const;
    void check(int m, int n_buses) const;  // throws InfeasibleConstraints
};

struct GreedyResult {
    Selection selection;
    double power = 0.0;
    double distance = 0.0;
    std::vector<int> added_order;  // buses appended beyond fixed_one
};

// Algorithm: start from fixed_one, repeatedly add the free bus that
// maximizes the current power-domain minimum; ties go to the lowest bus
// index within relative 1e-9 of the step maximum.
GreedyResult greedy_select(const ThetaMatrix& theta, int m, const ConstraintSet& constraints);

struct LpBound {
    double power = 0.0;
    double distance = 0.0;
    Eigen::VectorXd w;  // fractional selection, size n_buses
};

// LP relaxation of the constrained selection IP; certified upper bound.
LpBound lp_upper_bound(const ThetaMatrix& theta, int m, const ConstraintSet& constraints);

struct RoundResult {
    Selection selection;
    double power = 0.0;
    double distance = 0.0;
};

// Fixed-one buses first, then the largest fractional entries (ties by lowest
// index) until M buses are selected.
RoundResult round_largest(const Eigen::VectorXd& w, int m, const ConstraintSet& constraints,
                          const ThetaMatrix& theta);

// First bus the greedy heuristic would add under the constraints.
int next_bus(const ThetaMatrix& theta, int m, const ConstraintSet& constraints);

struct BnbOptions {
    double eps = 1e-9;          // relative gap, power domain
    long max_iterations = 10000;
};

struct TracePoint {
    long iteration;
    double upper_power;
    double lower_power;
    int leaf_count;
    int split_bus;  // -1 on the root row
};

struct BnbResult {
    Selection best;
    double lower_power = 0.0;
    double upper_power = 0.0;
    double lower_distance = 0.0;
    double upper_distance = 0.0;
    long iterations = 0;
    long i_achieve = 0;
    std::optional<long> i_prove;  // empty: gap not closed within max_iterations
    long lp_solves = 0;
    std::vector<TracePoint> trace;

    bool proven() const { return i_prove.has_value(); }
};

BnbResult branch_and_bound(const ThetaMatrix& theta, int m, int ref_bus,
                           const BnbOptions& options = {});

struct ExhaustiveResult {
    Selection best;
    double power = 0.0;
    double distance = 0.0;
    long long evaluated = 0;
};

// True optimum by enumeration of all C(N-1, M-1) selections containing the
// reference; ties resolved to the lexicographically smallest selection.
ExhaustiveResult exhaustive_search(const ThetaMatrix& theta, int m, int ref_bus,
                                   long long cap = 2'000'000);

using ThetaProvider = std::function<const ThetaMatrix&(int ref_bus)>;

struct RefTraversalResult {
    int best_ref = -1;
    BnbResult best;
    std::vector<std::optional<BnbResult>> per_ref;  // index = internal bus
    std::vector<std::pair<int, std::string>> failures;
};

// Runs branch_and_bound once per reference bus and keeps the maximum.
RefTraversalResult optimize_over_reference_buses(const ThetaProvider& provider, int n_buses,
                                                 int m, const BnbOptions& options = {},
                                                 int threads = 1);

// CSV trace: iteration, power- and norm-domain bounds, leaf count, split bus.
void write_trace_csv(std::ostream& out, const BnbResult& result, double p,
                     const std::vector<int>& bus_ids);

}  // namespace pmuplace
