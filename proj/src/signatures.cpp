#include "pmuplace/signatures.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <cstdio>
#include <ostream>

namespace pmuplace {

Eigen::VectorXd solve_dc_angles(const PowerNetwork& net, std::span<const int> removed, int ref_bus) {
    if (ref_bus < 0 || ref_bus >= net.n_buses) throw Error("reference bus out of range");
    const Components comp = connected_components(net, removed);
    if (comp.count != 1)
        throw IslandingUnsupported("outage disconnects the network (" +
                                   std::to_string(comp.count) + " components)");

    const BMatrix b = build_b_matrix(net, removed);
    const int n = net.n_buses;
    const int m = n - 1;

    // Reduced system: drop row/column ref_bus, solve the SPD remainder,
    // reinsert the zero angle. Equals the pseudoinverse solution shifted so
    // entry ref_bus is zero.
    Eigen::MatrixXd reduced(m, m);
    Eigen::VectorXd rhs(m);
    for (int i = 0, ri = 0; i < n; ++i) {
        if (i == ref_bus) continue;
        rhs(ri) = net.injections(i);
        for (int j = 0, rj = 0; j < n; ++j) {
            if (j == ref_bus) continue;
            reduced(ri, rj) = b(i, j);
            ++rj;
        }
        ++ri;
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(reduced);
    if (ldlt.info() != Eigen::Success)
        throw SingularSystem("reduced susceptance matrix factorization failed");
    const Eigen::VectorXd sol = ldlt.solve(rhs);

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
    for (int i = 0, ri = 0; i < n; ++i) {
        if (i == ref_bus) continue;
        theta(i) = sol(ri++);
    }

    const double residual = (b * theta - net.injections).lpNorm<Eigen::Infinity>();
    if (!std::isfinite(residual) || residual > 1e-8)
        throw SingularSystem("DC solve residual " + std::to_string(residual) + " exceeds 1e-8");
    return theta;
}

SignatureSet compute_signature_set(const PowerNetwork& net, const EventSet& events, int ref_bus) {
    SignatureSet sigs;
    sigs.ref_bus = ref_bus;
    sigs.angles.reserve(events.size());
    for (const OutageEvent& ev : events) {
        try {
            sigs.angles.push_back(solve_dc_angles(net, ev.removed_branches, ref_bus));
        } catch (const Error& e) {
            throw Error("event " + std::to_string(ev.id) + ": " + e.what());
        }
        sigs.event_ids.push_back(ev.id);
    }
    return sigs;
}

SignatureSet repin(const SignatureSet& sigs, int new_ref) {
    if (!sigs.angles.empty() && (new_ref < 0 || new_ref >= sigs.n_buses()))
        throw Error("reference bus out of range");
    SignatureSet out;
    out.ref_bus = new_ref;
    out.event_ids = sigs.event_ids;
    out.angles.reserve(sigs.angles.size());
    for (const Eigen::VectorXd& theta : sigs.angles) {
        Eigen::VectorXd shifted = theta.array() - theta(new_ref);
        shifted(new_ref) = 0.0;
        out.angles.push_back(std::move(shifted));
    }
    return out;
}

std::vector<std::pair<int, int>> find_signature_collisions(const SignatureSet& sigs, double tol) {
    std::vector<std::pair<int, int>> hits;
    const int e = sigs.n_events();
    for (int i = 0; i < e; ++i) {
        for (int j = i + 1; j < e; ++j) {
            const double gap = (sigs.angles[static_cast<std::size_t>(i)] -
                                sigs.angles[static_cast<std::size_t>(j)])
                                   .lpNorm<Eigen::Infinity>();
            if (gap <= tol)
                hits.emplace_back(sigs.event_ids[static_cast<std::size_t>(i)],
                                  sigs.event_ids[static_cast<std::size_t>(j)]);
        }
    }
    return hits;
}

void write_signature_csv(std::ostream& out, const SignatureSet& sigs, const PowerNetwork& net) {
    out << "event_id";
    for (int i = 0; i < net.n_buses; ++i) out << ",bus_" << net.id_of(i);
    out << "\n";
    char buf[40];
    for (int k = 0; k < sigs.n_events(); ++k) {
        out << sigs.event_ids[static_cast<std::size_t>(k)];
        const Eigen::VectorXd& theta = sigs.angles[static_cast<std::size_t>(k)];
        for (int i = 0; i < net.n_buses; ++i) {
            std::snprintf(buf, sizeof(buf), "%.12g", theta(i));
            out << ',' << buf;
        }
        out << "\n";
    }
}

}  // namespace pmuplace
