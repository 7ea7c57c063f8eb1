#pragma once

#include <span>

#include "pmuplace/signatures.hpp"

namespace pmuplace {

class EmptyPairSet : public Error {
  public:
    using Error::Error;
};

// Distance matrix of Eq-style columns |theta_i - theta_j|^p, elementwise,
// scaled per bus by sigma^-p. Row-major so a bus row is one contiguous span
// for the selection kernels. Columns are (scenario, i, j) with scenario
// major and 0 <= i < j lexicographic.
struct ThetaMatrix {
    int n_buses = 0;
    int ref_bus = 0;
    int n_events = 0;      // K + 1
    int n_scenarios = 1;   // T
    double p = 2.0;
    Eigen::VectorXd sigma;
    int n_cols = 0;        // T * (K+1 choose 2)
    std::vector<double> data;  // row-major n_buses x n_cols

    const double* row(int bus) const {
        return data.data() + static_cast<std::size_t>(bus) * static_cast<std::size_t>(n_cols);
    }
    double* row(int bus) {
        return data.data() + static_cast<std::size_t>(bus) * static_cast<std::size_t>(n_cols);
    }

    int column_index(int scenario, int i, int j) const;
    struct ColumnKey {
        int scenario;
        int event_i;
        int event_j;
    };
    ColumnKey column_key(int col) const;
};

// One scenario per SignatureSet; all sets must share the reference bus and
// event ids. Requires p >= 1 and sigma > 0 (size n_buses).
ThetaMatrix build_theta(std::span<const SignatureSet> scenarios, double p,
                        const Eigen::VectorXd& sigma);
ThetaMatrix build_theta(const SignatureSet& sigs, double p, const Eigen::VectorXd& sigma);
ThetaMatrix build_theta(const SignatureSet& sigs, double p = 2.0);

// Bus selection: sorted internal indices, always containing the reference.
struct Selection {
    int n_buses = 0;
    int ref_bus = 0;
    std::vector<int> buses;  // sorted ascending, includes ref_bus

    int m() const { return static_cast<int>(buses.size()); }
    static Selection of(int n_buses, int ref_bus, std::vector<int> buses);
    bool contains(int bus) const;
};

struct DminResult {
    double power = 0.0;     // min over columns of w^T Theta
    double distance = 0.0;  // power^(1/p)
    int argmin_col = -1;
    int scenario = 0;
    int event_i = 0;
    int event_j = 0;
};

// Power-domain selection value: min over columns of the selected row sum.
// Single implementation shared by the optimizer so values compare bitwise.
double selection_power(const ThetaMatrix& theta, std::span<const int> buses);

DminResult d_min(const Selection& sel, const ThetaMatrix& theta);

// Eq-literal oracle: the same minimum computed directly from projected
// signature vectors, no Theta matrix involved. Norm-domain result.
double pairwise_min_direct(std::span<const SignatureSet> scenarios, const Selection& sel,
                           double p, const Eigen::VectorXd& sigma);

}  // namespace pmuplace
