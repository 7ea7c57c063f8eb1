#pragma once

#include <memory>

#include "pmuplace/detection.hpp"
#include "pmuplace/optimizer.hpp"
#include "pmuplace/parsers.hpp"

namespace pmuplace {

// A loaded study: network, admissible single-line outages, and per-reference
// signature/distance structures. Signatures are solved once and re-pinned
// per reference bus; ThetaMatrix instances are cached per reference.
class Instance {
  public:
    Instance(PowerNetwork net, double p, Eigen::VectorXd sigma);

    static Instance load(const std::string& path, CaseFormat format, double p = 2.0,
                         double sigma_uniform = 1.0);

    const PowerNetwork& net() const { return net_; }
    const EventSet& events() const { return events_; }
    double p() const { return p_; }
    const Eigen::VectorXd& sigma() const { return sigma_; }
    int n_buses() const { return net_.n_buses; }
    int k_events() const { return static_cast<int>(events_.size()) - 1; }

    const SignatureSet& signatures(int ref_bus) const;
    const ThetaMatrix& theta(int ref_bus) const;

    // Builds the per-reference cache in parallel ahead of a traversal.
    void precompute_all_refs(int threads = 0) const;

    ThetaProvider theta_provider() const;

    // Value of an explicit selection set: best reference choice within the
    // set (the reference must carry a PMU).
    struct SelectionValue {
        int ref_bus;
        double power;
        double distance;
    };
    SelectionValue evaluate_selection(const std::vector<int>& buses) const;

  private:
    PowerNetwork net_;
    EventSet events_;
    double p_;
    Eigen::VectorXd sigma_;
    SignatureSet base_;  // pinned at internal bus 0
    mutable std::vector<std::unique_ptr<SignatureSet>> sigs_cache_;
    mutable std::vector<std::unique_ptr<ThetaMatrix>> theta_cache_;
};

}  // namespace pmuplace
