#pragma once

// Sequential Born-rule sampling of two-state classical series from infinite
// (and finite) MPS. One site at a time: the accumulated outcomes live in a
// chi x chi boundary matrix, the unmeasured half-chain in the transfer
// fixed point, exactly as in the infinite-chain closure.

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracspin/core/io.hpp"
#include "fracspin/core/rng.hpp"
#include "fracspin/itebd.hpp"

namespace fracspin::sampler {

enum class Basis { z, x };

inline char basis_char(Basis b) { return b == Basis::z ? 'z' : 'x'; }
inline Basis basis_from_char(char c) {
    if (c == 'z')
        return Basis::z;
    if (c == 'x')
        return Basis::x;
    throw std::invalid_argument("basis_from_char: expected 'z' or 'x'");
}

struct Trajectory {
    std::vector<std::int8_t> symbols;  // +-1, twice the measured spin
    Basis basis = Basis::z;
    std::uint64_t seed = 0;
    double delta = 0.0;

    long length() const { return static_cast<long>(symbols.size()); }
};

// M(l) = sum_{k<=l} s_k/2, or N(l) = sum_{k<=l} (-1)^k s_k/2 (k starts at 1)
inline std::vector<double> magnetization_series(const Trajectory& traj, bool staggered) {
    std::vector<double> out(traj.symbols.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < traj.symbols.size(); ++k) {
        double v = 0.5 * traj.symbols[k];
        if (staggered && (k % 2 == 0))  // odd 1-based position
            v = -v;
        acc += v;
        out[k] = acc;
    }
    return out;
}

// Accumulated fixed outcomes: M^{s1 s2 ...} contracted with its mirror.
struct ConditionalState {
    Eigen::MatrixXd boundary;
    int parity = 0;  // 0: next site is on the A sublattice
};

class InfiniteSampler {
public:
    InfiniteSampler(const itebd::UnitCellMps& m, Basis basis)
        : delta_(m.delta), basis_(basis), chi_(m.chi()) {
        p_[0] = itebd::detail::left_form_a(m);
        p_[1] = itebd::detail::left_form_b(m);
        if (basis == Basis::x) {
            // conjugate the physical leg with the orthogonal rotation that
            // diagonalizes S^x; index 0 then means S^x = +1/2
            const double r = 1.0 / std::sqrt(2.0);
            for (auto& p : p_) {
                const Eigen::MatrixXd up = r * (p[0] + p[1]);
                const Eigen::MatrixXd dn = r * (p[0] - p[1]);
                p = {up, dn};
            }
        }
        const auto fp = itebd::transfer_fixed_point(m);
        left_ = fp.left;
        renv_after_[1] = fp.right;  // after a B site: cell boundary
        renv_after_[0] = itebd::detail::transfer_right(p_[1], fp.right);
        // scale so that an un-conditioned step has unit normalization
        left_ /= (left_.array() * itebd::detail::transfer_right(p_[0], renv_after_[0]).array()).sum();
        // probability kernels: p(s) = <boundary, P^s R P^sT> costs chi^2
        for (int par = 0; par < 2; ++par)
            for (int s = 0; s < 2; ++s)
                kernel_[par][s] = p_[par][s] * renv_after_[par] * p_[par][s].transpose();
    }

    ConditionalState initial_state() const { return {left_, 0}; }

    // density matrix of the next site given the fixed past; diagonal entries
    // are the outcome probabilities
    Eigen::Matrix2d conditional_density(const ConditionalState& cond) const {
        const auto& p = p_[cond.parity];
        const auto& renv = renv_after_[cond.parity];
        Eigen::Matrix2d rho;
        for (int s = 0; s < 2; ++s)
            for (int t = s; t < 2; ++t) {
                rho(s, t) = (p[s].transpose() * cond.boundary * p[t] * renv).trace();
                rho(t, s) = rho(s, t);
            }
        const double tr = rho.trace();
        if (!(tr > 0.0))
            throw std::runtime_error(
                "conditional_density: non-positive trace (impossible history)");
        return rho / tr;
    }

    void advance(ConditionalState& cond, int outcome) const {
        const auto& p = p_[cond.parity];
        cond.boundary = p[outcome].transpose() * cond.boundary * p[outcome];
        cond.boundary /= cond.boundary.trace();
        cond.parity ^= 1;
    }

    Trajectory sample(long n, std::uint64_t seed) const {
        if (n < 1)
            throw std::domain_error("sample: requires n >= 1");
        core::RandomStream rng(seed);
        Trajectory traj;
        traj.symbols.reserve(static_cast<std::size_t>(n));
        traj.basis = basis_;
        traj.seed = seed;
        traj.delta = delta_;
        ConditionalState cond = initial_state();
        for (long t = 0; t < n; ++t) {
            const double p0 = (cond.boundary.array() * kernel_[cond.parity][0].array()).sum();
            const double p1 = (cond.boundary.array() * kernel_[cond.parity][1].array()).sum();
            if (!(p0 + p1 > 0.0))
                throw std::runtime_error("sample: non-positive trace (impossible history)");
            const int s = rng.next_uniform() < p0 / (p0 + p1) ? 0 : 1;
            traj.symbols.push_back(s == 0 ? 1 : -1);
            advance(cond, s);
        }
        return traj;
    }

    int chi() const { return chi_; }

private:
    std::array<itebd::SiteTensor, 2> p_;        // [parity]
    std::array<Eigen::MatrixXd, 2> renv_after_; // right env after absorbing parity
    std::array<std::array<Eigen::MatrixXd, 2>, 2> kernel_;
    Eigen::MatrixXd left_;
    double delta_;
    Basis basis_;
    int chi_;
};

inline Trajectory sample_infinite_mps(const itebd::UnitCellMps& m, long n,
                                      std::uint64_t seed, Basis basis) {
    return InfiniteSampler(m, basis).sample(n, seed);
}

// ---- finite MPS (validation harness) ----

using FiniteMps = std::vector<itebd::SiteTensor>;

// open-boundary left-orthonormal MPS from a full state vector (basis index
// bit i = site i, bit value 1 = down), no truncation
inline FiniteMps mps_from_statevector(Eigen::VectorXd psi, int sites) {
    if (psi.size() != (1L << sites))
        throw std::invalid_argument("mps_from_statevector: dimension mismatch");
    psi /= psi.norm();
    FiniteMps mps;
    // amplitude layout: row-major over (s_1 ... s_L), s_1 slowest
    Eigen::MatrixXd rest = Eigen::Map<Eigen::Matrix<double, 1, Eigen::Dynamic>>(
        psi.data(), 1, psi.size());
    long chi_l = 1;
    for (int i = 0; i < sites; ++i) {
        const long cols = rest.cols() / 2;
        Eigen::MatrixXd m(2 * chi_l, cols);
        for (long r = 0; r < chi_l; ++r)
            for (int s = 0; s < 2; ++s)
                m.row(s * chi_l + r) = rest.block(r, s * cols, 1, cols);
        if (i + 1 == sites) {
            itebd::SiteTensor a{m.block(0, 0, chi_l, 1), m.block(chi_l, 0, chi_l, 1)};
            mps.push_back(std::move(a));
            break;
        }
        Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        long rank = 0;
        for (Eigen::Index k = 0; k < sv.size(); ++k)
            if (sv(k) > 1e-14 * sv(0))
                ++rank;
        rank = std::max<long>(rank, 1);
        itebd::SiteTensor a{svd.matrixU().block(0, 0, chi_l, rank),
                            svd.matrixU().block(chi_l, 0, chi_l, rank)};
        mps.push_back(std::move(a));
        rest = sv.head(rank).asDiagonal() * svd.matrixV().leftCols(rank).transpose();
        chi_l = rank;
    }
    return mps;
}

// Born probability of one configuration (symbols +-1) by direct contraction
inline double finite_mps_probability(const FiniteMps& mps, const std::vector<int>& config) {
    if (config.size() != mps.size())
        throw std::invalid_argument("finite_mps_probability: length mismatch");
    Eigen::MatrixXd w = Eigen::MatrixXd::Ones(1, 1);
    for (std::size_t i = 0; i < mps.size(); ++i)
        w = w * mps[i][config[i] > 0 ? 0 : 1];
    if (w.rows() != 1 || w.cols() != 1)
        throw std::runtime_error("finite_mps_probability: network did not close");
    return w(0, 0) * w(0, 0);
}

inline std::vector<Trajectory> sample_finite_mps(const FiniteMps& mps, int n_samples,
                                                 std::uint64_t seed) {
    const int sites = static_cast<int>(mps.size());
    // right environments: env[i] closes everything right of site i
    std::vector<Eigen::MatrixXd> env(static_cast<std::size_t>(sites) + 1);
    env[sites] = Eigen::MatrixXd::Ones(1, 1);
    for (int i = sites - 1; i >= 0; --i)
        env[i] = mps[i][0] * env[i + 1] * mps[i][0].transpose() +
                 mps[i][1] * env[i + 1] * mps[i][1].transpose();

    std::vector<Trajectory> out;
    out.reserve(static_cast<std::size_t>(n_samples));
    for (int k = 0; k < n_samples; ++k) {
        const std::uint64_t sub_seed = core::derive_seed(seed, static_cast<std::uint64_t>(k));
        core::RandomStream rng(sub_seed);
        Trajectory traj;
        traj.seed = sub_seed;
        traj.symbols.reserve(static_cast<std::size_t>(sites));
        Eigen::MatrixXd w = Eigen::MatrixXd::Ones(1, 1);
        double norm = (w * env[0] * w.transpose())(0, 0);
        for (int i = 0; i < sites; ++i) {
            const Eigen::MatrixXd w_up = w * mps[i][0];
            const double p_up = (w_up * env[i + 1] * w_up.transpose())(0, 0) / norm;
            const int s = rng.next_uniform() < p_up ? 0 : 1;
            traj.symbols.push_back(s == 0 ? 1 : -1);
            w = w * mps[i][s];
            norm = (w * env[i + 1] * w.transpose())(0, 0);
        }
        out.push_back(std::move(traj));
    }
    return out;
}

// ---- trajectory CSV ----

inline void save_trajectory_csv(const std::string& path, const Trajectory& traj, int chi) {
    std::vector<double> col(traj.symbols.begin(), traj.symbols.end());
    core::save_csv(path,
                   {{"delta", std::to_string(traj.delta)},
                    {"chi", std::to_string(chi)},
                    {"basis", std::string(1, basis_char(traj.basis))},
                    {"seed", std::to_string(traj.seed)},
                    {"length", std::to_string(traj.length())}},
                   {col});
}

inline Trajectory load_trajectory_csv(const std::string& path) {
    const auto csv = core::load_csv(path);
    if (csv.columns.empty())
        throw std::runtime_error("load_trajectory_csv: no data in " + path);
    Trajectory traj;
    if (auto it = csv.header.find("basis"); it != csv.header.end())
        traj.basis = basis_from_char(it->second.at(0));
    if (auto it = csv.header.find("seed"); it != csv.header.end())
        traj.seed = std::stoull(it->second);
    if (auto it = csv.header.find("delta"); it != csv.header.end())
        traj.delta = std::stod(it->second);
    traj.symbols.reserve(csv.columns[0].size());
    for (double v : csv.columns[0]) {
        if (v != 1.0 && v != -1.0)
            throw std::runtime_error("load_trajectory_csv: symbol not +-1 in " + path);
        traj.symbols.push_back(static_cast<std::int8_t>(v));
    }
    return traj;
}

} // namespace fracspin::sampler
