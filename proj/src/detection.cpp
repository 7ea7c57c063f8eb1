#include "pmuplace/detection.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pmuplace/kernels.hpp"
#include "pmuplace/parallel.hpp"
#include "pmuplace/rng.hpp"

namespace pmuplace {

NoiseModel NoiseModel::uniform(int n_buses, double sigma_rad) {
    NoiseModel nm;
    nm.sigma = Eigen::VectorXd::Constant(n_buses, sigma_rad);
    return nm;
}

void NoiseModel::validate(int n_buses) const {
    if (sigma.size() != n_buses) throw Error("noise model size mismatch");
    for (int i = 0; i < n_buses; ++i)
        if (!(sigma(i) > 0.0)) throw Error("noise sigma must be positive");
}

DetectionReport simulate_detection(const SignatureSet& sigs, const Selection& sel,
                                   const NoiseModel& noise, int trials, std::uint64_t seed,
                                   int threads) {
    if (trials < 1) throw Error("simulate_detection: trials must be >= 1");
    noise.validate(sigs.n_buses());
    const int e = sigs.n_events();
    const int ns = sel.m();
    const std::size_t nsz = static_cast<std::size_t>(ns);

    // Projected per-event signatures and the classifier's candidate
    // difference vectors (theta_k - theta_0), sigma-normalized. Row k of
    // each buffer is contiguous.
    std::vector<double> projected(static_cast<std::size_t>(e) * nsz);
    std::vector<double> candidates(static_cast<std::size_t>(e) * nsz);
    Eigen::VectorXd inv_sigma(ns), sigma_sel(ns);
    for (int j = 0; j < ns; ++j) {
        const int bus = sel.buses[static_cast<std::size_t>(j)];
        sigma_sel(j) = noise.sigma(bus);
        inv_sigma(j) = 1.0 / noise.sigma(bus);
    }
    for (int k = 0; k < e; ++k) {
        for (int j = 0; j < ns; ++j) {
            const int bus = sel.buses[static_cast<std::size_t>(j)];
            projected[static_cast<std::size_t>(k) * nsz + static_cast<std::size_t>(j)] =
                sigs.angles[static_cast<std::size_t>(k)](bus);
        }
    }
    for (int k = 0; k < e; ++k) {
        for (int j = 0; j < ns; ++j) {
            const std::size_t at = static_cast<std::size_t>(k) * nsz + static_cast<std::size_t>(j);
            candidates[at] = (projected[at] - projected[static_cast<std::size_t>(j)]) * inv_sigma(j);
        }
    }

    DetectionReport report;
    report.trials_per_event = trials;
    report.seed = seed;
    report.rng_algorithm = rng::kAlgorithm;
    report.confusion = Eigen::MatrixXi::Zero(e, e);

    for (int i = 0; i < e; ++i) {
        for (int j = i + 1; j < e; ++j) {
            double gap = 0.0;
            for (int c = 0; c < ns; ++c)
                gap = std::max(gap, std::abs(projected[static_cast<std::size_t>(i) * nsz +
                                                       static_cast<std::size_t>(c)] -
                                             projected[static_cast<std::size_t>(j) * nsz +
                                                       static_cast<std::size_t>(c)]));
            if (gap <= 1e-12)
                report.collisions.emplace_back(sigs.event_ids[static_cast<std::size_t>(i)],
                                               sigs.event_ids[static_cast<std::size_t>(j)]);
        }
    }

    const auto& kern = kernels::active();
    std::vector<std::vector<int>> partial(static_cast<std::size_t>(e),
                                          std::vector<int>(static_cast<std::size_t>(e), 0));

    parallel_for_index(e, threads, [&](int truth) {
        std::vector<double> obs(nsz);
        std::vector<int>& row = partial[static_cast<std::size_t>(truth)];
        const double* base_row = projected.data();
        const double* truth_row = projected.data() + static_cast<std::size_t>(truth) * nsz;
        for (int trial = 0; trial < trials; ++trial) {
            const std::uint64_t ctr0 = (static_cast<std::uint64_t>(truth) << 40) ^
                                       (static_cast<std::uint64_t>(trial) << 12);
            for (int j = 0; j < ns; ++j) {
                const double z0 = rng::gaussian(seed, ctr0 + 2 * static_cast<std::uint64_t>(j));
                const double z1 = rng::gaussian(seed, ctr0 + 2 * static_cast<std::uint64_t>(j) + 1);
                const double pre = base_row[j] + sigma_sel(j) * z0;
                const double post = truth_row[j] + sigma_sel(j) * z1;
                obs[static_cast<std::size_t>(j)] = (post - pre) * inv_sigma(j);
            }
            int best = 0;
            double best_d = kern.sq_dist(obs.data(), candidates.data(), nsz);
            for (int k = 1; k < e; ++k) {
                const double d = kern.sq_dist(
                    obs.data(), candidates.data() + static_cast<std::size_t>(k) * nsz, nsz);
                if (d < best_d) {
                    best_d = d;
                    best = k;
                }
            }
            ++row[static_cast<std::size_t>(best)];
        }
    });

    long correct = 0;
    for (int truth = 0; truth < e; ++truth) {
        for (int k = 0; k < e; ++k)
            report.confusion(truth, k) = partial[static_cast<std::size_t>(truth)][static_cast<std::size_t>(k)];
        correct += report.confusion(truth, truth);
    }
    report.success_rate =
        static_cast<double>(correct) / (static_cast<double>(e) * static_cast<double>(trials));
    return report;
}

std::vector<CurvePoint> success_vs_dmin_curve(const PowerNetwork& net, const EventSet& events,
                                              std::span<const Selection> selections,
                                              const NoiseModel& noise, int trials,
                                              std::uint64_t seed, int threads) {
    noise.validate(net.n_buses);
    std::map<int, SignatureSet> sigs_by_ref;
    std::map<int, ThetaMatrix> theta_by_ref;
    std::vector<CurvePoint> curve;
    for (const Selection& sel : selections) {
        auto it = sigs_by_ref.find(sel.ref_bus);
        if (it == sigs_by_ref.end()) {
            it = sigs_by_ref.emplace(sel.ref_bus, compute_signature_set(net, events, sel.ref_bus))
                     .first;
            theta_by_ref.emplace(sel.ref_bus, build_theta(it->second, 2.0, noise.sigma));
        }
        CurvePoint point;
        point.m = sel.m();
        point.d_min = d_min(sel, theta_by_ref.at(sel.ref_bus)).distance;
        point.success_rate =
            simulate_detection(it->second, sel, noise, trials, seed, threads).success_rate;
        curve.push_back(point);
    }
    return curve;
}

}  // namespace pmuplace
