#pragma once

#include <cstdint>

#include "pmuplace/separation.hpp"

namespace pmuplace {

// Independent Gaussian observation noise, per bus, radians. Applies to both
// the pre- and post-outage angle snapshots.
struct NoiseModel {
    Eigen::VectorXd sigma;

    static NoiseModel uniform(int n_buses, double sigma_rad);
    void validate(int n_buses) const;
};

struct DetectionReport {
    int trials_per_event = 0;
    std::uint64_t seed = 0;
    std::string rng_algorithm;
    Eigen::MatrixXi confusion;  // rows: true event index, cols: decision
    double success_rate = 0.0;
    std::vector<std::pair<int, int>> collisions;  // event id pairs with identical projections
};

// Monte-Carlo run of the nearest-signature classifier: per trial draw noisy
// pre/post angle vectors at the selected buses and pick the event whose
// sigma-normalized projected signature difference is closest (ties to the
// lowest event index). Bitwise deterministic given the seed, for any worker
// count.
DetectionReport simulate_detection(const SignatureSet& sigs, const Selection& sel,
                                   const NoiseModel& noise, int trials, std::uint64_t seed,
                                   int threads = 0);

struct CurvePoint {
    int m = 0;
    double d_min = 0.0;  // sigma-normalized, p = 2
    double success_rate = 0.0;
};

// One detection run per selection; d_min evaluated at each selection's own
// reference bus with the noise sigmas as normalization.
std::vector<CurvePoint> success_vs_dmin_curve(const PowerNetwork& net, const EventSet& events,
                                              std::span<const Selection> selections,
                                              const NoiseModel& noise, int trials,
                                              std::uint64_t seed, int threads = 0);

}  // namespace pmuplace
