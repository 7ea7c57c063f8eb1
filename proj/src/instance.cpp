#include "pmuplace/instance.hpp"

#include "pmuplace/parallel.hpp"

namespace pmuplace {

Instance::Instance(PowerNetwork net, double p, Eigen::VectorXd sigma)
    : net_(std::move(net)), p_(p), sigma_(std::move(sigma)) {
    net_.validate();
    if (sigma_.size() != net_.n_buses) throw Error("sigma length must match bus count");
    events_ = enumerate_single_line_outages(net_);
    base_ = compute_signature_set(net_, events_, 0);
    sigs_cache_.resize(static_cast<std::size_t>(net_.n_buses));
    theta_cache_.resize(static_cast<std::size_t>(net_.n_buses));
}

Instance Instance::load(const std::string& path, CaseFormat format, double p,
                        double sigma_uniform) {
    PowerNetwork net = load_network(path, format);
    Eigen::VectorXd sigma = Eigen::VectorXd::Constant(net.n_buses, sigma_uniform);
    return Instance(std::move(net), p, std::move(sigma));
}

const SignatureSet& Instance::signatures(int ref_bus) const {
    if (ref_bus < 0 || ref_bus >= net_.n_buses) throw Error("reference bus out of range");
    auto& slot = sigs_cache_[static_cast<std::size_t>(ref_bus)];
    if (!slot) slot = std::make_unique<SignatureSet>(repin(base_, ref_bus));
    return *slot;
}

const ThetaMatrix& Instance::theta(int ref_bus) const {
    auto& slot = theta_cache_[static_cast<std::size_t>(ref_bus)];
    if (!slot) slot = std::make_unique<ThetaMatrix>(build_theta(signatures(ref_bus), p_, sigma_));
    return *slot;
}

void Instance::precompute_all_refs(int threads) const {
    parallel_for_index(net_.n_buses, threads, [&](int r) { (void)theta(r); });
}

ThetaProvider Instance::theta_provider() const {
    return [this](int ref_bus) -> const ThetaMatrix& { return theta(ref_bus); };
}

Instance::SelectionValue Instance::evaluate_selection(const std::vector<int>& buses) const {
    if (buses.empty()) throw Error("evaluate_selection: empty selection");
    SelectionValue best{-1, -1.0, 0.0};
    for (int r : buses) {
        const Selection sel = Selection::of(net_.n_buses, r, buses);
        const DminResult d = d_min(sel, theta(r));
        if (best.ref_bus < 0 || d.power > best.power) best = {r, d.power, d.distance};
    }
    return best;
}

}  // namespace pmuplace
