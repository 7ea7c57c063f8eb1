#include "pmuplace/separation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmuplace/kernels.hpp"

namespace pmuplace {

int ThetaMatrix::column_index(int scenario, int i, int j) const {
    const int e = n_events;
    const int per = e * (e - 1) / 2;
    const int before_i = i * (e - 1) - i * (i - 1) / 2;
    return scenario * per + before_i + (j - i - 1);
}

ThetaMatrix::ColumnKey ThetaMatrix::column_key(int col) const {
    const int e = n_events;
    const int per = e * (e - 1) / 2;
    ColumnKey key{col / per, 0, 0};
    int rem = col % per;
    int i = 0;
    while (rem >= e - 1 - i) {
        rem -= e - 1 - i;
        ++i;
    }
    key.event_i = i;
    key.event_j = i + 1 + rem;
    return key;
}

ThetaMatrix build_theta(std::span<const SignatureSet> scenarios, double p,
                        const Eigen::VectorXd& sigma) {
    if (scenarios.empty()) throw Error("build_theta: no signature sets");
    if (!(p >= 1.0) || !std::isfinite(p)) throw Error("build_theta: p must be finite and >= 1");
    const SignatureSet& first = scenarios.front();
    const int n = first.n_buses();
    const int e = first.n_events();
    if (e < 2) throw EmptyPairSet("need at least two events to form signature pairs");
    if (sigma.size() != n) throw Error("build_theta: sigma length mismatch");
    for (int i = 0; i < n; ++i)
        if (!(sigma(i) > 0.0)) throw Error("build_theta: sigma entries must be positive");
    for (const SignatureSet& s : scenarios) {
        if (s.ref_bus != first.ref_bus) throw Error("build_theta: mismatched reference buses");
        if (s.event_ids != first.event_ids) throw Error("build_theta: mismatched event sets");
        if (s.n_buses() != n) throw Error("build_theta: mismatched bus counts");
    }

    ThetaMatrix theta;
    theta.n_buses = n;
    theta.ref_bus = first.ref_bus;
    theta.n_events = e;
    theta.n_scenarios = static_cast<int>(scenarios.size());
    theta.p = p;
    theta.sigma = sigma;
    const int per = e * (e - 1) / 2;
    theta.n_cols = theta.n_scenarios * per;
    theta.data.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(theta.n_cols), 0.0);

    Eigen::VectorXd inv_sigma_p(n);
    for (int b = 0; b < n; ++b) inv_sigma_p(b) = std::pow(sigma(b), -p);

    for (int t = 0; t < theta.n_scenarios; ++t) {
        const SignatureSet& s = scenarios[static_cast<std::size_t>(t)];
        for (int i = 0; i < e; ++i) {
            const Eigen::VectorXd& a = s.angles[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < e; ++j) {
                const Eigen::VectorXd& b = s.angles[static_cast<std::size_t>(j)];
                const int col = theta.column_index(t, i, j);
                if (p == 2.0) {
                    for (int bus = 0; bus < n; ++bus) {
                        const double d = a(bus) - b(bus);
                        theta.row(bus)[col] = (d * d) * inv_sigma_p(bus);
                    }
                } else {
                    for (int bus = 0; bus < n; ++bus) {
                        theta.row(bus)[col] =
                            std::pow(std::abs(a(bus) - b(bus)), p) * inv_sigma_p(bus);
                    }
                }
            }
        }
    }
    return theta;
}

ThetaMatrix build_theta(const SignatureSet& sigs, double p, const Eigen::VectorXd& sigma) {
    return build_theta(std::span<const SignatureSet>(&sigs, 1), p, sigma);
}

ThetaMatrix build_theta(const SignatureSet& sigs, double p) {
    return build_theta(sigs, p, Eigen::VectorXd::Ones(sigs.n_buses()));
}

Selection Selection::of(int n_buses, int ref_bus, std::vector<int> buses) {
    Selection sel;
    sel.n_buses = n_buses;
    sel.ref_bus = ref_bus;
    sel.buses = std::move(buses);
    std::sort(sel.buses.begin(), sel.buses.end());
    sel.buses.erase(std::unique(sel.buses.begin(), sel.buses.end()), sel.buses.end());
    if (!sel.contains(ref_bus)) throw Error("selection must contain the reference bus");
    for (int b : sel.buses)
        if (b < 0 || b >= n_buses) throw Error("selection bus out of range");
    return sel;
}

bool Selection::contains(int bus) const {
    return std::binary_search(buses.begin(), buses.end(), bus);
}

double selection_power(const ThetaMatrix& theta, std::span<const int> buses) {
    const auto& k = kernels::active();
    const std::size_t q = static_cast<std::size_t>(theta.n_cols);
    std::vector<double> acc(q, 0.0);
    for (int b : buses) k.add_assign(acc.data(), theta.row(b), q);
    return k.min_reduce(acc.data(), q);
}

DminResult d_min(const Selection& sel, const ThetaMatrix& theta) {
    if (sel.n_buses != theta.n_buses) throw Error("d_min: bus count mismatch");
    if (sel.ref_bus != theta.ref_bus) throw Error("d_min: reference bus mismatch");
    const std::size_t q = static_cast<std::size_t>(theta.n_cols);
    const auto& k = kernels::active();
    std::vector<double> acc(q, 0.0);
    for (int b : sel.buses) k.add_assign(acc.data(), theta.row(b), q);

    DminResult res;
    res.power = acc[0];
    res.argmin_col = 0;
    for (std::size_t c = 1; c < q; ++c) {
        if (acc[c] < res.power) {
            res.power = acc[c];
            res.argmin_col = static_cast<int>(c);
        }
    }
    const auto key = theta.column_key(res.argmin_col);
    res.scenario = key.scenario;
    res.event_i = key.event_i;
    res.event_j = key.event_j;
    res.distance = std::pow(res.power, 1.0 / theta.p);
    return res;
}

double pairwise_min_direct(std::span<const SignatureSet> scenarios, const Selection& sel,
                           double p, const Eigen::VectorXd& sigma) {
    if (scenarios.empty()) throw Error("pairwise_min_direct: no signature sets");
    const int e = scenarios.front().n_events();
    if (e < 2) throw EmptyPairSet("need at least two events to form signature pairs");
    double best = std::numeric_limits<double>::infinity();
    for (const SignatureSet& s : scenarios) {
        for (int i = 0; i < e; ++i) {
            for (int j = i + 1; j < e; ++j) {
                double sum = 0.0;
                for (int b : sel.buses) {
                    const double d = std::abs(s.angles[static_cast<std::size_t>(i)](b) -
                                              s.angles[static_cast<std::size_t>(j)](b)) /
                                     sigma(b);
                    sum += std::pow(d, p);
                }
                const double dist = std::pow(sum, 1.0 / p);
                best = std::min(best, dist);
            }
        }
    }
    return best;
}

}  // namespace pmuplace
