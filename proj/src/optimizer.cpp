#include "pmuplace/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "pmuplace/kernels.hpp"
#include "pmuplace/parallel.hpp"

namespace pmuplace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> sorted_insert(const std::vector<int>& v, int bus) {
    std::vector<int> out = v;
    out.insert(std::upper_bound(out.begin(), out.end(), bus), bus);
    return out;
}

double to_distance(double power, double p) { return std::pow(power, 1.0 / p); }

// One greedy step: value of adding each free bus on top of acc, maximum
// taken with the lowest-index tie-break at relative tolerance 1e-9.
struct StepResult {
    int bus = -1;
    double power = -kInf;
};

StepResult greedy_step(const ThetaMatrix& theta, const std::vector<double>& acc,
                       const std::vector<int>& free_buses) {
    const auto& kern = kernels::active();
    const std::size_t q = acc.size();
    StepResult best;
    std::vector<double> vals(free_buses.size());
    for (std::size_t i = 0; i < free_buses.size(); ++i) {
        vals[i] = kern.min_plus(acc.data(), theta.row(free_buses[i]), q);
        if (vals[i] > best.power) best.power = vals[i];
    }
    const double threshold = best.power - 1e-9 * std::abs(best.power);
    for (std::size_t i = 0; i < free_buses.size(); ++i) {
        if (vals[i] >= threshold) {
            best.bus = free_buses[i];
            best.power = vals[i];
            break;
        }
    }
    return best;
}

std::vector<int> free_buses_of(const ConstraintSet& cs, int n_buses) {
    std::vector<char> blocked(static_cast<std::size_t>(n_buses), 0);
    for (int b : cs.fixed_one) blocked[static_cast<std::size_t>(b)] = 1;
    for (int b : cs.fixed_zero) blocked[static_cast<std::size_t>(b)] = 1;
    std::vector<int> free;
    for (int b = 0; b < n_buses; ++b)
        if (!blocked[static_cast<std::size_t>(b)]) free.push_back(b);
    return free;
}

}  // namespace

ConstraintSet ConstraintSet::root(int ref_bus) {
    ConstraintSet cs;
    cs.fixed_one.push_back(ref_bus);
    return cs;
}

ConstraintSet ConstraintSet::child_with_one(int bus, long creation) const {
    ConstraintSet cs;
    cs.fixed_one = sorted_insert(fixed_one, bus);
    cs.fixed_zero = fixed_zero;
    cs.creation_index = creation;
    return cs;
}

ConstraintSet ConstraintSet::child_with_zero(int bus, long creation) const {
    ConstraintSet cs;
    cs.fixed_one = fixed_one;
    cs.fixed_zero = sorted_insert(fixed_zero, bus);
    cs.creation_index = creation;
    return cs;
}

bool ConstraintSet::feasible_for(int m, int n_buses) const {
    if (static_cast<int>(fixed_one.size()) > m) return false;
    if (n_buses - static_cast<int>(fixed_zero.size()) < m) return false;
    std::vector<int> overlap;
    std::set_intersection(fixed_one.begin(), fixed_one.end(), fixed_zero.begin(),
                          fixed_zero.end(), std::back_inserter(overlap));
    return overlap.empty();
}

void ConstraintSet::check(int m, int n_buses) const {
    if (!feasible_for(m, n_buses))
        throw InfeasibleConstraints("constraint set infeasible for M=" + std::to_string(m));
}

GreedyResult greedy_select(const ThetaMatrix& theta, int m, const ConstraintSet& constraints) {
    constraints.check(m, theta.n_buses);
    const auto& kern = kernels::active();
    const std::size_t q = static_cast<std::size_t>(theta.n_cols);

    std::vector<double> acc(q, 0.0);
    for (int b : constraints.fixed_one) kern.add_assign(acc.data(), theta.row(b), q);
    std::vector<int> chosen = constraints.fixed_one;
    std::vector<int> free = free_buses_of(constraints, theta.n_buses);

    GreedyResult res;
    double power = kern.min_reduce(acc.data(), q);
    while (static_cast<int>(chosen.size()) < m) {
        const StepResult step = greedy_step(theta, acc, free);
        kern.add_assign(acc.data(), theta.row(step.bus), q);
        chosen.insert(std::upper_bound(chosen.begin(), chosen.end(), step.bus), step.bus);
        free.erase(std::find(free.begin(), free.end(), step.bus));
        res.added_order.push_back(step.bus);
        power = step.power;
    }
    res.selection = Selection::of(theta.n_buses, theta.ref_bus, chosen);
    res.power = power;
    res.distance = to_distance(power, theta.p);
    return res;
}

LpBound lp_upper_bound(const ThetaMatrix& theta, int m, const ConstraintSet& constraints) {
    constraints.check(m, theta.n_buses);
    lp::RelaxationResult rel =
        lp::solve_relaxation(theta, m, constraints.fixed_one, constraints.fixed_zero);
    LpBound bound;
    bound.power = rel.upper_power;
    bound.distance = to_distance(rel.upper_power, theta.p);
    bound.w = std::move(rel.w);
    return bound;
}

RoundResult round_largest(const Eigen::VectorXd& w, int m, const ConstraintSet& constraints,
                          const ThetaMatrix& theta) {
    constraints.check(m, theta.n_buses);
    if (w.size() != theta.n_buses) throw Error("round_largest: w size mismatch");

    std::vector<char> state(static_cast<std::size_t>(theta.n_buses), 0);
    for (int b : constraints.fixed_one) state[static_cast<std::size_t>(b)] = 1;
    for (int b : constraints.fixed_zero) state[static_cast<std::size_t>(b)] = 2;

    std::vector<int> chosen = constraints.fixed_one;
    std::vector<int> order;
    for (int b = 0; b < theta.n_buses; ++b)
        if (state[static_cast<std::size_t>(b)] == 0) order.push_back(b);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return w(a) > w(b); });
    for (int b : order) {
        if (static_cast<int>(chosen.size()) >= m) break;
        chosen.push_back(b);
    }

    RoundResult res;
    res.selection = Selection::of(theta.n_buses, theta.ref_bus, chosen);
    res.power = selection_power(theta, res.selection.buses);
    res.distance = to_distance(res.power, theta.p);
    return res;
}

int next_bus(const ThetaMatrix& theta, int m, const ConstraintSet& constraints) {
    constraints.check(m, theta.n_buses);
    const std::vector<int> free = free_buses_of(constraints, theta.n_buses);
    if (free.empty()) throw Error("next_bus: no free bus");
    const auto& kern = kernels::active();
    const std::size_t q = static_cast<std::size_t>(theta.n_cols);
    std::vector<double> acc(q, 0.0);
    for (int b : constraints.fixed_one) kern.add_assign(acc.data(), theta.row(b), q);
    return greedy_step(theta, acc, free).bus;
}

namespace {

struct Leaf {
    ConstraintSet cs;
    double ub = 0.0;
    double lb = 0.0;
    Selection lb_selection;
    bool closed = false;  // fully determined; never split
};

}  // namespace

BnbResult branch_and_bound(const ThetaMatrix& theta, int m, int ref_bus,
                           const BnbOptions& options) {
    if (m < 1 || m > theta.n_buses) throw InfeasibleConstraints("M out of range");
    if (ref_bus != theta.ref_bus) throw Error("branch_and_bound: theta pinned at a different bus");
    if (!(options.eps > 0.0)) throw Error("branch_and_bound: eps must be positive");
    if (options.max_iterations < 1) throw Error("branch_and_bound: max_iterations must be >= 1");

    BnbResult res;
    long lp_solves = 0;

    auto evaluate = [&](Leaf& leaf) {
        const int n_one = static_cast<int>(leaf.cs.fixed_one.size());
        const int n_free = theta.n_buses - n_one - static_cast<int>(leaf.cs.fixed_zero.size());
        if (n_one == m || n_one + n_free == m) {
            // Fully determined; exact value, no bounding calls needed.
            GreedyResult g = greedy_select(theta, m, leaf.cs);
            leaf.lb = leaf.ub = g.power;
            leaf.lb_selection = std::move(g.selection);
            leaf.closed = true;
            return;
        }
        LpBound ub = lp_upper_bound(theta, m, leaf.cs);
        ++lp_solves;
        GreedyResult lb = greedy_select(theta, m, leaf.cs);
        leaf.ub = ub.power;
        leaf.lb = lb.power;
        leaf.lb_selection = std::move(lb.selection);
    };

    std::vector<Leaf> leaves;
    leaves.emplace_back();
    leaves.back().cs = ConstraintSet::root(ref_bus);
    leaves.back().cs.check(m, theta.n_buses);
    evaluate(leaves.back());

    long creation_counter = 1;
    double upper = leaves.back().ub;
    double lower = leaves.back().lb;
    Selection incumbent = leaves.back().lb_selection;

    auto gap_closed = [&] { return upper - lower <= options.eps * std::max(upper, 1e-30); };

    long iter = 1;
    res.trace.push_back(TracePoint{iter, upper, lower, 1, -1});
    if (gap_closed()) res.i_prove = iter;

    while (!gap_closed() && iter < options.max_iterations) {
        // Eq.-(18)-style choice: splittable leaf with the highest upper
        // bound, ties by lowest creation index (scan order preserves it).
        int pick = -1;
        for (int i = 0; i < static_cast<int>(leaves.size()); ++i) {
            if (leaves[static_cast<std::size_t>(i)].closed) continue;
            if (pick < 0 || leaves[static_cast<std::size_t>(i)].ub >
                                leaves[static_cast<std::size_t>(pick)].ub)
                pick = i;
        }
        if (pick < 0) break;  // only closed leaves remain

        Leaf parent = std::move(leaves[static_cast<std::size_t>(pick)]);
        leaves.erase(leaves.begin() + pick);
        const int split = next_bus(theta, m, parent.cs);

        Leaf child0, child1;
        child0.cs = parent.cs.child_with_zero(split, creation_counter++);
        child1.cs = parent.cs.child_with_one(split, creation_counter++);
        for (Leaf* child : {&child0, &child1}) {
            if (!child->cs.feasible_for(m, theta.n_buses)) continue;  // empty region
            evaluate(*child);
            // A child's feasible region is contained in the parent's, so the
            // parent bound always dominates; clamping shields the monotone
            // invariant from LP rounding jitter.
            child->ub = std::min(child->ub, parent.ub);
            if (child->lb > lower) {
                lower = child->lb;
                incumbent = child->lb_selection;
            }
            leaves.push_back(std::move(*child));
        }

        upper = -kInf;
        for (const Leaf& leaf : leaves) upper = std::max(upper, leaf.ub);
        upper = std::max(upper, lower);

        ++iter;
        res.trace.push_back(TracePoint{iter, upper, lower, static_cast<int>(leaves.size()), split});
        if (!res.i_prove && gap_closed()) res.i_prove = iter;
    }

    res.best = incumbent;
    res.lower_power = lower;
    res.upper_power = upper;
    res.lower_distance = to_distance(lower, theta.p);
    res.upper_distance = to_distance(upper, theta.p);
    res.iterations = iter;
    res.lp_solves = lp_solves;
    res.i_achieve = iter;
    for (const TracePoint& tp : res.trace) {
        if (tp.lower_power == lower) {
            res.i_achieve = tp.iteration;
            break;
        }
    }
    return res;
}

ExhaustiveResult exhaustive_search(const ThetaMatrix& theta, int m, int ref_bus, long long cap) {
    if (m < 1 || m > theta.n_buses) throw InfeasibleConstraints("M out of range");
    if (ref_bus != theta.ref_bus) throw Error("exhaustive_search: theta pinned at a different bus");

    const int n_free = theta.n_buses - 1;
    const int need = m - 1;
    double combos = 1.0;
    for (int i = 1; i <= need; ++i) combos = combos * (n_free - need + i) / i;
    if (combos > static_cast<double>(cap))
        throw EnumerationCapExceeded("C(" + std::to_string(n_free) + "," + std::to_string(need) +
                                     ") exceeds enumeration cap " + std::to_string(cap));

    std::vector<int> free;
    for (int b = 0; b < theta.n_buses; ++b)
        if (b != ref_bus) free.push_back(b);

    const auto& kern = kernels::active();
    const std::size_t q = static_cast<std::size_t>(theta.n_cols);

    // acc[d] is the column sum of {ref} plus the first d chosen buses.
    std::vector<std::vector<double>> acc(static_cast<std::size_t>(need) + 1,
                                         std::vector<double>(q, 0.0));
    kern.add_assign(acc[0].data(), theta.row(ref_bus), q);

    ExhaustiveResult res;
    res.power = -kInf;
    std::vector<int> current(static_cast<std::size_t>(need), -1);
    std::vector<int> best_combo;

    if (need == 0) {
        res.power = kern.min_reduce(acc[0].data(), q);
        res.evaluated = 1;
    } else {
        // Depth-first lexicographic enumeration with incremental sums.
        auto recurse = [&](auto&& self, int depth, int start) -> void {
            const int remaining = need - depth - 1;
            for (int i = start; i < static_cast<int>(free.size()) - remaining; ++i) {
                current[static_cast<std::size_t>(depth)] = free[static_cast<std::size_t>(i)];
                if (remaining == 0) {
                    const double v = kern.min_plus(
                        acc[static_cast<std::size_t>(depth)].data(),
                        theta.row(free[static_cast<std::size_t>(i)]), q);
                    ++res.evaluated;
                    if (v > res.power) {
                        res.power = v;
                        best_combo.assign(current.begin(), current.end());
                    }
                } else {
                    kern.add_to(acc[static_cast<std::size_t>(depth) + 1].data(),
                                acc[static_cast<std::size_t>(depth)].data(),
                                theta.row(free[static_cast<std::size_t>(i)]), q);
                    self(self, depth + 1, i + 1);
                }
            }
        };
        recurse(recurse, 0, 0);
    }

    std::vector<int> buses = best_combo;
    buses.push_back(ref_bus);
    res.best = Selection::of(theta.n_buses, ref_bus, std::move(buses));
    res.distance = to_distance(res.power, theta.p);
    return res;
}

RefTraversalResult optimize_over_reference_buses(const ThetaProvider& provider, int n_buses,
                                                 int m, const BnbOptions& options, int threads) {
    RefTraversalResult res;
    res.per_ref.resize(static_cast<std::size_t>(n_buses));
    std::vector<std::string> errors(static_cast<std::size_t>(n_buses));

    parallel_for_index(n_buses, threads, [&](int r) {
        try {
            const ThetaMatrix& theta = provider(r);
            res.per_ref[static_cast<std::size_t>(r)] = branch_and_bound(theta, m, r, options);
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(r)] = e.what();
        }
    });

    for (int r = 0; r < n_buses; ++r) {
        if (!errors[static_cast<std::size_t>(r)].empty()) {
            res.failures.emplace_back(r, errors[static_cast<std::size_t>(r)]);
            continue;
        }
        const BnbResult& candidate = *res.per_ref[static_cast<std::size_t>(r)];
        if (res.best_ref < 0 || candidate.lower_power > res.best.lower_power) {
            res.best_ref = r;
            res.best = candidate;
        }
    }
    if (res.best_ref < 0)
        throw Error("all reference buses failed: " +
                    (res.failures.empty() ? std::string("no result") : res.failures.front().second));
    return res;
}

void write_trace_csv(std::ostream& out, const BnbResult& result, double p,
                     const std::vector<int>& bus_ids) {
    out << "iteration,upper_power,lower_power,upper_bound,lower_bound,leaf_count,split_bus\n";
    char buf[160];
    for (const TracePoint& tp : result.trace) {
        std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.12g,%.12g,%d,", tp.iteration,
                      tp.upper_power, tp.lower_power, std::pow(tp.upper_power, 1.0 / p),
                      std::pow(tp.lower_power, 1.0 / p), tp.leaf_count);
        out << buf;
        if (tp.split_bus >= 0)
            out << bus_ids[static_cast<std::size_t>(tp.split_bus)];
        out << "\n";
    }
}

}  // namespace pmuplace
