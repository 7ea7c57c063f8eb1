#include "pmuplace/simplex.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "pmuplace/kernels.hpp"

namespace pmuplace::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dual of the relaxed selection problem, in equality standard form:
//
//   min  g~^T y + M' mu + 1^T v
//   s.t. sum_c y_c = 1                                  (row 0)
//        -(A~ y)_i + mu + v_i - s_i = 0   per free bus i
//        y, v, s >= 0, mu free
//
// where A~ holds the free-bus rows of Theta and g~ the fixed-one column
// offsets, both divided by a common scale. The basis has |free|+1 rows, so
// the revised simplex stays cheap no matter how many columns Theta has.
//
// Any dual-feasible point upper-bounds the primal optimum; for a fixed y the
// tightest completion over (mu, v) evaluates to
//   g^T y + (sum of the M' largest entries of A y),
// which is what run() returns, recomputed against the unscaled data. That
// keeps the bound valid even under floating-point slop in the pivoting.
class DualSimplex {
  public:
    DualSimplex(const ThetaMatrix& theta, std::span<const int> free_buses, int m_prime,
                const std::vector<double>& g_unscaled)
        : theta_(theta),
          free_(free_buses.begin(), free_buses.end()),
          m_prime_(m_prime),
          g_(g_unscaled),
          nf_(static_cast<int>(free_buses.size())),
          q_(theta.n_cols),
          m_(nf_ + 1) {
        double scale = 0.0;
        for (double v : g_) scale = std::max(scale, v);
        for (int i : free_) {
            const double* row = theta_.row(i);
            for (int c = 0; c < q_; ++c) scale = std::max(scale, row[c]);
        }
        if (scale <= 0.0) scale = 1.0;

        a_scaled_.resize(nf_, q_);
        for (int i = 0; i < nf_; ++i) {
            const double* row = theta_.row(free_[static_cast<std::size_t>(i)]);
            for (int c = 0; c < q_; ++c) a_scaled_(i, c) = row[c] / scale;
        }
        g_scaled_.resize(q_);
        for (int c = 0; c < q_; ++c) g_scaled_(c) = g_[static_cast<std::size_t>(c)] / scale;
    }

    RelaxationResult run() {
        init_basis();

        Eigen::MatrixXd basis_mat(m_, m_);
        Eigen::VectorXd xb(m_), pi(m_), cb(m_), dir(m_), col(m_);
        in_basis_.assign(static_cast<std::size_t>(n_vars()), 0);

        const double tol_cost = 1e-11 * std::max(1.0, static_cast<double>(m_prime_));
        const int max_iter = 2000 + 200 * m_;
        int stall = 0;
        bool bland = false;
        double prev_obj = kInf;
        int iter = 0;

        for (;; ++iter) {
            if (iter >= max_iter)
                throw LpFailure("simplex did not converge within " + std::to_string(max_iter) +
                                " iterations");
            std::fill(in_basis_.begin(), in_basis_.end(), 0);
            for (int k = 0; k < m_; ++k) {
                column(basis_[static_cast<std::size_t>(k)], col);
                basis_mat.col(k) = col;
                cb(k) = cost(basis_[static_cast<std::size_t>(k)]);
                in_basis_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(k)])] = 1;
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(basis_mat);
            if (!lu.isInvertible()) throw LpFailure("singular simplex basis");
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
            rhs(0) = 1.0;
            xb = lu.solve(rhs);
            Eigen::FullPivLU<Eigen::MatrixXd> lut(basis_mat.transpose());
            pi = lut.solve(cb);

            const double obj = cb.dot(xb);
            if (obj < prev_obj - 1e-15 * (1.0 + std::abs(prev_obj))) {
                stall = 0;
                prev_obj = obj;
            } else if (++stall > 60) {
                bland = true;  // anti-cycling fallback
            }

            const int entering = pick_entering(pi, tol_cost, bland);
            if (entering < 0) return finish(xb, pi, iter);

            column(entering, col);
            dir = lu.solve(col);
            const int leaving = pick_leaving(xb, dir, bland);
            if (leaving < 0) throw LpFailure("dual unbounded: infeasible selection constraints");
            basis_[static_cast<std::size_t>(leaving)] = entering;
        }
    }

  private:
    // variable layout: [0, q) y_c; q mu (absent when nf_ == 0);
    // (q, q+nf] v_i; (q+nf, q+2nf] s_i
    int n_vars() const { return nf_ == 0 ? q_ : q_ + 1 + 2 * nf_; }

    double cost(int j) const {
        if (j < q_) return g_scaled_(j);
        if (j == q_) return static_cast<double>(m_prime_);
        if (j <= q_ + nf_) return 1.0;
        return 0.0;
    }

    void column(int j, Eigen::VectorXd& out) const {
        out.setZero(m_);
        if (j < q_) {
            out(0) = 1.0;
            for (int i = 0; i < nf_; ++i) out(1 + i) = -a_scaled_(i, j);
        } else if (j == q_) {
            for (int i = 0; i < nf_; ++i) out(1 + i) = 1.0;
        } else if (j <= q_ + nf_) {
            out(1 + (j - q_ - 1)) = 1.0;
        } else {
            out(1 + (j - q_ - nf_ - 1)) = -1.0;
        }
    }

    // Dantzig: most negative reduced cost. Bland: lowest variable index with
    // a negative reduced cost (y indices precede mu/v/s, so scanning in
    // order and stopping at the first hit is exactly Bland's rule).
    int pick_entering(const Eigen::VectorXd& pi, double tol_cost, bool bland) const {
        int entering = -1;
        double best_rc = -tol_cost;

        Eigen::VectorXd rc_y = g_scaled_;
        rc_y.array() -= pi(0);
        if (nf_ > 0) rc_y.noalias() += a_scaled_.transpose() * pi.tail(nf_);
        for (int c = 0; c < q_; ++c) {
            if (in_basis_[static_cast<std::size_t>(c)]) continue;
            if (rc_y(c) < best_rc) {
                best_rc = rc_y(c);
                entering = c;
                if (bland) return entering;
            }
        }
        for (int i = 0; i < nf_; ++i) {
            const int jv = q_ + 1 + i;
            if (!in_basis_[static_cast<std::size_t>(jv)]) {
                const double rc = 1.0 - pi(1 + i);
                if (rc < best_rc) {
                    best_rc = rc;
                    entering = jv;
                    if (bland) return entering;
                }
            }
            const int js = q_ + 1 + nf_ + i;
            if (!in_basis_[static_cast<std::size_t>(js)]) {
                const double rc = pi(1 + i);
                if (rc < best_rc) {
                    best_rc = rc;
                    entering = js;
                    if (bland) return entering;
                }
            }
        }
        return entering;
    }

    // Ratio test over basic variables with positive direction. mu is free and
    // never blocks. Ties go to the largest pivot (stability) or, under
    // Bland, to the lowest variable index.
    int pick_leaving(const Eigen::VectorXd& xb, const Eigen::VectorXd& dir, bool bland) const {
        const double tol_pivot = 1e-11;
        int leaving = -1;
        double best_ratio = kInf;
        double best_dir = 0.0;
        for (int k = 0; k < m_; ++k) {
            const int bv = basis_[static_cast<std::size_t>(k)];
            if (nf_ > 0 && bv == q_) continue;
            const double d = dir(k);
            if (d <= tol_pivot) continue;
            const double ratio = std::max(xb(k), 0.0) / d;
            bool take;
            if (leaving < 0) {
                take = true;
            } else if (ratio < best_ratio - 1e-12 * (1.0 + best_ratio)) {
                take = true;
            } else if (ratio <= best_ratio + 1e-12 * (1.0 + best_ratio)) {
                take = bland ? bv < basis_[static_cast<std::size_t>(leaving)] : d > best_dir;
            } else {
                take = false;
            }
            if (take) {
                leaving = k;
                best_ratio = ratio;
                best_dir = d;
            }
        }
        return leaving;
    }

    void init_basis() {
        basis_.clear();
        if (nf_ == 0) {
            basis_.push_back(0);
            return;
        }
        // y_0 covers the normalization row; mu covers the bus row with the
        // largest coefficient; slacks cover the rest. Feasible by
        // construction, so no phase-1 is needed.
        int istar = 0;
        for (int i = 1; i < nf_; ++i)
            if (a_scaled_(i, 0) > a_scaled_(istar, 0)) istar = i;
        basis_.push_back(0);
        basis_.push_back(q_);
        for (int i = 0; i < nf_; ++i)
            if (i != istar) basis_.push_back(q_ + 1 + nf_ + i);
    }

    RelaxationResult finish(const Eigen::VectorXd& xb, const Eigen::VectorXd& pi, int iters) const {
        // Clean dual weights: clip negatives, renormalize to a distribution.
        Eigen::VectorXd y = Eigen::VectorXd::Zero(q_);
        for (int k = 0; k < m_; ++k) {
            const int j = basis_[static_cast<std::size_t>(k)];
            if (j < q_) y(j) = std::max(xb(k), 0.0);
        }
        const double total = y.sum();
        if (!(total > 0.0)) throw LpFailure("degenerate dual weights");
        y /= total;

        RelaxationResult res;
        res.iterations = iters;

        double bound = 0.0;
        for (int c = 0; c < q_; ++c) bound += g_[static_cast<std::size_t>(c)] * y(c);
        if (m_prime_ > 0) {
            std::vector<double> v(static_cast<std::size_t>(nf_));
            for (int i = 0; i < nf_; ++i) {
                const double* row = theta_.row(free_[static_cast<std::size_t>(i)]);
                double dot = 0.0;
                for (int c = 0; c < q_; ++c) dot += row[c] * y(c);
                v[static_cast<std::size_t>(i)] = dot;
            }
            std::nth_element(v.begin(), v.begin() + (m_prime_ - 1), v.end(),
                             std::greater<double>());
            bound += std::accumulate(v.begin(), v.begin() + m_prime_, 0.0);
        }
        res.upper_power = bound;

        res.w = Eigen::VectorXd::Zero(theta_.n_buses);
        for (int i = 0; i < nf_; ++i)
            res.w(free_[static_cast<std::size_t>(i)]) = std::clamp(pi(1 + i), 0.0, 1.0);
        return res;
    }

    const ThetaMatrix& theta_;
    std::vector<int> free_;
    int m_prime_;
    const std::vector<double>& g_;
    int nf_;
    int q_;
    int m_;
    Eigen::MatrixXd a_scaled_;
    Eigen::VectorXd g_scaled_;
    std::vector<int> basis_;
    std::vector<char> in_basis_;
};

}  // namespace

RelaxationResult solve_relaxation(const ThetaMatrix& theta, int m_target,
                                  std::span<const int> fixed_one, std::span<const int> fixed_zero) {
    const int n = theta.n_buses;
    std::vector<char> state(static_cast<std::size_t>(n), 0);  // 0 free, 1 fixed-one, 2 fixed-zero
    for (int b : fixed_one) {
        if (b < 0 || b >= n) throw Error("fixed-one bus out of range");
        state[static_cast<std::size_t>(b)] = 1;
    }
    for (int b : fixed_zero) {
        if (b < 0 || b >= n) throw Error("fixed-zero bus out of range");
        if (state[static_cast<std::size_t>(b)] == 1) throw Error("bus fixed to both 0 and 1");
        state[static_cast<std::size_t>(b)] = 2;
    }
    std::vector<int> ones, free_buses;
    for (int b = 0; b < n; ++b) {
        if (state[static_cast<std::size_t>(b)] == 1) ones.push_back(b);
        if (state[static_cast<std::size_t>(b)] == 0) free_buses.push_back(b);
    }
    const int m_prime = m_target - static_cast<int>(ones.size());
    if (m_prime < 0 || m_prime > static_cast<int>(free_buses.size()))
        throw Error("infeasible constraints for M=" + std::to_string(m_target));

    // Column offsets contributed by the fixed-one buses; accumulated with the
    // same kernel as selection_power so fully determined problems agree
    // bitwise with d_min.
    const auto& kern = kernels::active();
    std::vector<double> g(static_cast<std::size_t>(theta.n_cols), 0.0);
    for (int b : ones) kern.add_assign(g.data(), theta.row(b), g.size());

    if (free_buses.empty() || m_prime == 0) {
        RelaxationResult res;
        res.upper_power = kern.min_reduce(g.data(), g.size());
        res.w = Eigen::VectorXd::Zero(n);
        for (int b : ones) res.w(b) = 1.0;
        return res;
    }
    if (m_prime == static_cast<int>(free_buses.size())) {
        RelaxationResult res;
        std::vector<double> acc = g;
        for (int b : free_buses) kern.add_assign(acc.data(), theta.row(b), acc.size());
        res.upper_power = kern.min_reduce(acc.data(), acc.size());
        res.w = Eigen::VectorXd::Zero(n);
        for (int b : ones) res.w(b) = 1.0;
        for (int b : free_buses) res.w(b) = 1.0;
        return res;
    }

    DualSimplex solver(theta, free_buses, m_prime, g);
    RelaxationResult res = solver.run();
    for (int b : ones) res.w(b) = 1.0;
    return res;
}

}  // namespace pmuplace::lp
