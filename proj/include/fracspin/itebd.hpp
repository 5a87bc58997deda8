#pragma once

// Infinite XXZ ground states as a two-site unit-cell MPS (Vidal Gamma/lambda
// form): imaginary-time evolution with a decreasing Trotter schedule,
// gauge fixing, transfer-matrix fixed points, bond energies and two-point
// correlators, and the IMPS state-file format.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fracspin/core/io.hpp"

namespace fracspin::itebd {

struct XxzParams {
    double delta = 0.0;
    double coupling = 1.0;
};

// per physical index s: chi_left x chi_right block
using SiteTensor = std::array<Eigen::MatrixXd, 2>;

// state = ... [Gamma_A lambda_a Gamma_B lambda_b] repeated; bond a sits
// inside the cell, bond b between cells.
struct UnitCellMps {
    SiteTensor gamma_a, gamma_b;
    Eigen::VectorXd lambda_a, lambda_b;
    double delta = 0.0;
    double energy = std::numeric_limits<double>::quiet_NaN();

    int chi() const { return static_cast<int>(lambda_b.size()); }
};

struct NonConvergenceError : std::runtime_error {
    double last_delta;
    explicit NonConvergenceError(double d)
        : std::runtime_error("itebd: energy change " + std::to_string(d) +
                             " still above tolerance after max sweeps"),
          last_delta(d) {}
};

struct EntanglementCollapseError : std::runtime_error {
    EntanglementCollapseError()
        : std::runtime_error("itebd: bond spectrum collapsed to rank 1 "
                             "(product fixed point; state left the critical phase)") {}
};

// bond term h = J (Sx Sx + Sy Sy + Delta Sz Sz); real symmetric in the
// basis |s1 s2>, index 2 s1 + s2.
inline Eigen::Matrix4d xxz_bond_hamiltonian(const XxzParams& p) {
    Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
    h(0, 0) = h(3, 3) = 0.25 * p.delta;
    h(1, 1) = h(2, 2) = -0.25 * p.delta;
    h(1, 2) = h(2, 1) = 0.5;
    return p.coupling * h;
}

inline Eigen::Matrix4d xxz_gate(const XxzParams& p, double tau) {
    if (!(tau > 0.0))
        throw std::domain_error("xxz_gate: requires tau > 0");
    const Eigen::Matrix4d h = xxz_bond_hamiltonian(p);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(h);
    return es.eigenvectors() *
           (-tau * es.eigenvalues().array()).exp().matrix().asDiagonal() *
           es.eigenvectors().transpose();
}

inline std::vector<std::pair<double, int>> default_schedule() {
    return {{0.1, 2000}, {0.05, 1000}, {0.01, 2000}, {0.001, 4000}};
}

namespace detail {

inline Eigen::VectorXd pseudo_inverse(const Eigen::VectorXd& v, double rel_tol = 1e-12) {
    const double floor = v.maxCoeff() * rel_tol;
    Eigen::VectorXd inv(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        inv(i) = v(i) > floor ? 1.0 / v(i) : 0.0;
    return inv;
}

// One two-site update on (G1 lamμ G2) with outer weights lam_out on both
// sides; returns new rank. Used for gate application on either bond.
inline int apply_two_site_gate(const Eigen::Matrix4d& gate, SiteTensor& g1,
                               Eigen::VectorXd& lam_mid, SiteTensor& g2,
                               const Eigen::VectorXd& lam_out, int chi_max,
                               double sv_floor = 1e-14) {
    const Eigen::Index xl = g1[0].rows();
    const Eigen::Index xr = g2[0].cols();
    Eigen::MatrixXd theta(2 * xl, 2 * xr);
    for (int s = 0; s < 2; ++s) {
        const Eigen::MatrixXd left = lam_out.asDiagonal() * g1[s] * lam_mid.asDiagonal();
        for (int t = 0; t < 2; ++t)
            theta.block(s * xl, t * xr, xl, xr) = left * g2[t] * lam_out.asDiagonal();
    }
    // gate acts on the physical pair
    Eigen::MatrixXd theta2(2 * xl, 2 * xr);
    theta2.setZero();
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t) {
            for (int u = 0; u < 2; ++u)
                for (int v = 0; v < 2; ++v) {
                    const double g = gate(2 * s + t, 2 * u + v);
                    if (g != 0.0)
                        theta2.block(s * xl, t * xr, xl, xr) +=
                            g * theta.block(u * xl, v * xr, xl, xr);
                }
        }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(theta2, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size() && i < chi_max; ++i)
        if (sv(i) > sv_floor * sv(0))
            ++rank;
    rank = std::max(rank, 1);

    lam_mid = sv.head(rank) / sv.head(rank).norm();
    const Eigen::VectorXd inv_out = pseudo_inverse(lam_out);
    for (int s = 0; s < 2; ++s) {
        g1[s] = inv_out.asDiagonal() * svd.matrixU().block(s * xl, 0, xl, rank);
        g2[s] = svd.matrixV().block(s * xr, 0, xr, rank).transpose() * inv_out.asDiagonal();
    }
    return rank;
}

// left action X -> sum_s (P^s)^T X P^s and right action X -> sum_s P^s X (P^s)^T
inline Eigen::MatrixXd transfer_left(const SiteTensor& p, const Eigen::MatrixXd& x) {
    return p[0].transpose() * x * p[0] + p[1].transpose() * x * p[1];
}
inline Eigen::MatrixXd transfer_right(const SiteTensor& p, const Eigen::MatrixXd& x) {
    return p[0] * x * p[0].transpose() + p[1] * x * p[1].transpose();
}
// operator-inserted left action: sum_{s,t} O(t,s) (P^t)^T X P^s
inline Eigen::MatrixXd transfer_left_op(const SiteTensor& p, const Eigen::MatrixXd& x,
                                        const Eigen::Matrix2d& op) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p[0].cols(), p[0].cols());
    for (int t = 0; t < 2; ++t)
        for (int s = 0; s < 2; ++s)
            if (op(t, s) != 0.0)
                out += op(t, s) * p[t].transpose() * x * p[s];
    return out;
}

struct PowerResult {
    Eigen::MatrixXd vec;
    double eigenvalue = 0.0;
    int iterations = 0;
    bool converged = false;
};

template <typename Map>
PowerResult power_iteration(const Map& apply, Eigen::Index dim, double tol = 1e-12,
                            int max_iter = 100000) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Identity(dim, dim) / std::sqrt(static_cast<double>(dim));
    PowerResult r;
    for (int it = 1; it <= max_iter; ++it) {
        Eigen::MatrixXd y = apply(x);
        y = 0.5 * (y + y.transpose().eval());
        const double nrm = y.norm();
        if (!(nrm > 0.0))
            throw std::runtime_error("power_iteration: map annihilated the iterate");
        y /= nrm;
        if (y.trace() < 0.0)  // fix the sign ambiguity toward PSD iterates
            y = -y;
        const double diff = (y - x).norm();
        x = y;
        if (diff < tol) {
            r.vec = x;
            const Eigen::MatrixXd ax = apply(x);
            r.eigenvalue = (x.array() * ax.array()).sum();
            r.iterations = it;
            r.converged = true;
            return r;
        }
    }
    r.vec = x;
    const Eigen::MatrixXd ax = apply(x);
    r.eigenvalue = (x.array() * ax.array()).sum();
    r.iterations = max_iter;
    r.converged = false;
    return r;
}

inline SiteTensor left_form_a(const UnitCellMps& m) {
    return {m.lambda_b.asDiagonal() * m.gamma_a[0], m.lambda_b.asDiagonal() * m.gamma_a[1]};
}
inline SiteTensor left_form_b(const UnitCellMps& m) {
    return {m.lambda_a.asDiagonal() * m.gamma_b[0], m.lambda_a.asDiagonal() * m.gamma_b[1]};
}

} // namespace detail

struct TransferFixedPoint {
    Eigen::MatrixXd left;   // at bond b (cell boundary)
    Eigen::MatrixXd right;  // at bond b
    double eigenvalue = 0.0;
};

// Dominant left/right eigenvectors of the unit-cell transfer operator.
// Throws if the dominant eigenvalue is (numerically) degenerate.
inline TransferFixedPoint transfer_fixed_point(const UnitCellMps& m,
                                               double tol = 1e-12) {
    const SiteTensor pa = detail::left_form_a(m);
    const SiteTensor pb = detail::left_form_b(m);
    const Eigen::Index chi = m.lambda_b.size();

    auto right_map = [&](const Eigen::MatrixXd& x) {
        return detail::transfer_right(pa, detail::transfer_right(pb, x));
    };
    auto left_map = [&](const Eigen::MatrixXd& x) {
        return detail::transfer_left(pb, detail::transfer_left(pa, x));
    };
    auto r = detail::power_iteration(right_map, chi, tol);
    auto l = detail::power_iteration(left_map, chi, tol);
    if (!r.converged || !l.converged)
        throw std::runtime_error("transfer_fixed_point: power iteration did not converge");

    // degeneracy check: dominant eigenvalue in the orthogonal complement
    if (chi > 1) {
        Eigen::MatrixXd y = Eigen::MatrixXd::Zero(chi, chi);
        y(0, 0) = 1.0;
        y(chi - 1, chi - 1) = -1.0;
        y -= (y.array() * r.vec.array()).sum() * r.vec;
        y /= y.norm();
        double sub = 0.0;
        for (int it = 0; it < 400; ++it) {
            Eigen::MatrixXd z = right_map(y);
            z = 0.5 * (z + z.transpose().eval());
            z -= (z.array() * r.vec.array()).sum() * r.vec;
            sub = z.norm();
            if (!(sub > 0.0))
                break;
            y = z / sub;
        }
        if (std::abs(r.eigenvalue) - sub < 1e-10 * std::abs(r.eigenvalue))
            throw std::runtime_error(
                "transfer_fixed_point: degenerate dominant eigenvalue (gap " +
                std::to_string(std::abs(r.eigenvalue) - sub) + "), MPS not injective");
    }

    TransferFixedPoint fp;
    fp.right = r.vec / r.vec.norm();
    const double overlap = (l.vec.array() * fp.right.array()).sum();
    fp.left = l.vec / overlap;  // trace(left * right) = sum l_ij r_ij = 1
    fp.eigenvalue = r.eigenvalue;
    return fp;
}

// Rescales the tensors so the cell transfer eigenvalue is exactly 1.
inline void normalize_transfer(UnitCellMps& m) {
    const auto fp = transfer_fixed_point(m);
    const double c = std::pow(fp.eigenvalue, -0.25);
    for (int s = 0; s < 2; ++s) {
        m.gamma_a[s] *= c;
        m.gamma_b[s] *= c;
    }
}

// max Frobenius deviation from the four Vidal orthonormality conditions
inline double canonical_defect(const UnitCellMps& m) {
    const Eigen::VectorXd la2 = m.lambda_a.array().square();
    const Eigen::VectorXd lb2 = m.lambda_b.array().square();
    auto dev = [](const Eigen::MatrixXd& x) {
        return (x - Eigen::MatrixXd::Identity(x.rows(), x.cols())).norm();
    };
    const auto& ga = m.gamma_a;
    const auto& gb = m.gamma_b;
    double d = dev(ga[0].transpose() * lb2.asDiagonal() * ga[0] +
                   ga[1].transpose() * lb2.asDiagonal() * ga[1]);
    d = std::max(d, dev(ga[0] * la2.asDiagonal() * ga[0].transpose() +
                        ga[1] * la2.asDiagonal() * ga[1].transpose()));
    d = std::max(d, dev(gb[0].transpose() * la2.asDiagonal() * gb[0] +
                        gb[1].transpose() * la2.asDiagonal() * gb[1]));
    d = std::max(d, dev(gb[0] * lb2.asDiagonal() * gb[0].transpose() +
                        gb[1] * lb2.asDiagonal() * gb[1].transpose()));
    return d;
}

// One-shot gauge fixing: treat the cell as a single site with a 4-dim
// physical leg, fix bond b by the fixed-point square-root construction,
// then re-split the cell with an SVD to make bond a canonical too.
inline void canonicalize(UnitCellMps& m) {
    const Eigen::Index chi_b = m.lambda_b.size();
    std::array<Eigen::MatrixXd, 4> cell;
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t)
            cell[2 * s + t] = m.gamma_a[s] * m.lambda_a.asDiagonal() * m.gamma_b[t];

    auto right_map = [&](const Eigen::MatrixXd& x) {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(chi_b, chi_b);
        for (const auto& c : cell) {
            const Eigen::MatrixXd a = c * m.lambda_b.asDiagonal();
            out += a * x * a.transpose();
        }
        return out;
    };
    auto left_map = [&](const Eigen::MatrixXd& x) {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(chi_b, chi_b);
        for (const auto& c : cell) {
            const Eigen::MatrixXd b = m.lambda_b.asDiagonal() * c;
            out += b.transpose() * x * b;
        }
        return out;
    };
    const auto rp = detail::power_iteration(right_map, chi_b, 1e-13);
    const auto lp = detail::power_iteration(left_map, chi_b, 1e-13);

    auto sqrt_factor = [](const Eigen::MatrixXd& x) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
        Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        return std::make_pair(Eigen::MatrixXd(es.eigenvectors() * d.asDiagonal()),
                              Eigen::MatrixXd(detail::pseudo_inverse(d).asDiagonal() *
                                              es.eigenvectors().transpose()));
    };
    const auto [y, y_inv] = sqrt_factor(rp.vec);        // R = Y Y^T
    const auto [xt, xt_inv] = sqrt_factor(lp.vec);      // L = X^T X with X = xt^T
    const Eigen::MatrixXd x_mat = xt.transpose();
    const Eigen::MatrixXd x_inv = xt_inv.transpose();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(x_mat * m.lambda_b.asDiagonal() * y,
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd lam_b = svd.singularValues();
    lam_b /= lam_b.norm();
    for (auto& c : cell)
        c = svd.matrixV().transpose() * y_inv * c * x_inv * svd.matrixU();
    m.lambda_b = lam_b;

    // normalize the transfer eigenvalue of the regauged cell to 1
    {
        auto map2 = [&](const Eigen::MatrixXd& x) {
            Eigen::MatrixXd out = Eigen::MatrixXd::Zero(lam_b.size(), lam_b.size());
            for (const auto& c : cell) {
                const Eigen::MatrixXd a = c * m.lambda_b.asDiagonal();
                out += a * x * a.transpose();
            }
            return out;
        };
        const auto eta = detail::power_iteration(map2, lam_b.size(), 1e-13);
        const double c = 1.0 / std::sqrt(eta.eigenvalue);
        for (auto& t : cell)
            t *= c;
    }

    // re-split the cell: theta = lam_b Gamma_cell lam_b, SVD over the middle
    const Eigen::Index xb = m.lambda_b.size();
    Eigen::MatrixXd theta(2 * xb, 2 * xb);
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t)
            theta.block(s * xb, t * xb, xb, xb) =
                m.lambda_b.asDiagonal() * cell[2 * s + t] * m.lambda_b.asDiagonal();
    Eigen::BDCSVD<Eigen::MatrixXd> split(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = split.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size() && i < m.chi(); ++i)
        if (sv(i) > 1e-14 * sv(0))
            ++rank;
    rank = std::max(rank, 1);
    m.lambda_a = sv.head(rank) / sv.head(rank).norm();
    const Eigen::VectorXd inv_b = detail::pseudo_inverse(m.lambda_b);
    for (int s = 0; s < 2; ++s) {
        m.gamma_a[s] = inv_b.asDiagonal() * split.matrixU().block(s * xb, 0, xb, rank);
        m.gamma_b[s] = split.matrixV().block(s * xb, 0, xb, rank).transpose() * inv_b.asDiagonal();
    }
}

// quick energy estimate from the lambda environments (exact in canonical
// gauge); used as the convergence monitor during evolution
inline double energy_estimate(const UnitCellMps& m, const Eigen::Matrix4d& h) {
    double e = 0.0;
    for (int bond = 0; bond < 2; ++bond) {
        const SiteTensor& g1 = bond == 0 ? m.gamma_a : m.gamma_b;
        const SiteTensor& g2 = bond == 0 ? m.gamma_b : m.gamma_a;
        const Eigen::VectorXd& mid = bond == 0 ? m.lambda_a : m.lambda_b;
        const Eigen::VectorXd& out = bond == 0 ? m.lambda_b : m.lambda_a;
        std::array<Eigen::MatrixXd, 4> th;
        for (int s = 0; s < 2; ++s)
            for (int t = 0; t < 2; ++t)
                th[2 * s + t] = out.asDiagonal() * g1[s] * mid.asDiagonal() * g2[t] *
                                out.asDiagonal();
        double num = 0.0, den = 0.0;
        for (int q = 0; q < 4; ++q) {
            den += (th[q].array() * th[q].array()).sum();
            for (int p = 0; p < 4; ++p)
                if (h(p, q) != 0.0)
                    num += h(p, q) * (th[p].array() * th[q].array()).sum();
        }
        e += 0.5 * num / den;
    }
    return e;
}

struct ItebdOptions {
    double conv_tol = 1e-10;   // per-bond energy change between sweeps at final tau
    int max_extra_sweeps = 60000;
    bool quiet = true;
};

// Imaginary-time evolution to the ground state at bond dimension chi.
inline UnitCellMps itebd_ground_state(const XxzParams& params, int chi,
                                      std::vector<std::pair<double, int>> schedule =
                                          default_schedule(),
                                      const ItebdOptions& opts = {}) {
    if (chi < 2)
        throw std::domain_error("itebd_ground_state: chi too small (need chi >= 2)");
    if (schedule.empty())
        throw std::domain_error("itebd_ground_state: empty tau schedule");
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (!(schedule[i].first < schedule[i - 1].first))
            throw std::domain_error("itebd_ground_state: schedule taus must decrease");
    if (std::abs(params.delta) > 1.0)
        std::cerr << "itebd: warning: |Delta| > 1 leaves the critical phase; "
                     "correlation-scaling claims do not apply\n";

    const Eigen::Matrix4d h = xxz_bond_hamiltonian(params);

    // tilted-Neel product start; deterministic
    UnitCellMps m;
    m.delta = params.delta;
    const double th = 0.4;
    m.gamma_a[0] = Eigen::MatrixXd::Constant(1, 1, std::cos(th));
    m.gamma_a[1] = Eigen::MatrixXd::Constant(1, 1, std::sin(th));
    m.gamma_b[0] = Eigen::MatrixXd::Constant(1, 1, std::sin(th));
    m.gamma_b[1] = Eigen::MatrixXd::Constant(1, 1, std::cos(th));
    m.lambda_a = Eigen::VectorXd::Ones(1);
    m.lambda_b = Eigen::VectorXd::Ones(1);

    int prev_rank = 1;
    auto step_pair = [&](const Eigen::Matrix4d& ga, const Eigen::Matrix4d& gb) {
        const int ra = detail::apply_two_site_gate(ga, m.gamma_a, m.lambda_a, m.gamma_b,
                                                   m.lambda_b, chi);
        const int rb = detail::apply_two_site_gate(gb, m.gamma_b, m.lambda_b, m.gamma_a,
                                                   m.lambda_a, chi);
        const int rank = std::min(ra, rb);
        if (rank == 1 && prev_rank > 1)
            throw EntanglementCollapseError();
        prev_rank = std::max(rank, prev_rank);
    };

    // second-order sweeps: gate(tau/2) on bond a at the stage edges
    for (const auto& [tau, steps] : schedule) {
        const Eigen::Matrix4d g = xxz_gate(params, tau);
        const Eigen::Matrix4d gh = xxz_gate(params, 0.5 * tau);
        detail::apply_two_site_gate(gh, m.gamma_a, m.lambda_a, m.gamma_b, m.lambda_b, chi);
        for (int i = 0; i < steps; ++i) {
            const int rb = detail::apply_two_site_gate(g, m.gamma_b, m.lambda_b, m.gamma_a,
                                                       m.lambda_a, chi);
            const Eigen::Matrix4d& ga = (i + 1 == steps) ? gh : g;
            const int ra = detail::apply_two_site_gate(ga, m.gamma_a, m.lambda_a, m.gamma_b,
                                                       m.lambda_b, chi);
            const int rank = std::min(ra, rb);
            if (rank == 1 && prev_rank > 1)
                throw EntanglementCollapseError();
            prev_rank = std::max(rank, prev_rank);
        }
    }

    // keep sweeping at the final tau until the energy estimate settles
    {
        const double tau = schedule.back().first;
        const Eigen::Matrix4d g = xxz_gate(params, tau);
        double e_prev = energy_estimate(m, h);
        double delta_e = std::numeric_limits<double>::infinity();
        bool done = false;
        for (int sweep = 0; sweep < opts.max_extra_sweeps; ++sweep) {
            step_pair(g, g);
            const double e = energy_estimate(m, h);
            delta_e = std::abs(e - e_prev);
            e_prev = e;
            if (delta_e < opts.conv_tol) {
                done = true;
                break;
            }
        }
        if (!done)
            throw NonConvergenceError(delta_e);
    }

    canonicalize(m);
    return m;
}

// average of the two inequivalent bond energies via the transfer fixed points
inline double energy_per_bond(const UnitCellMps& m, const XxzParams& params) {
    const Eigen::Matrix4d h = xxz_bond_hamiltonian(params);
    const auto fp = transfer_fixed_point(m);
    const SiteTensor pa = detail::left_form_a(m);
    const SiteTensor pb = detail::left_form_b(m);

    auto bond_energy = [&](const SiteTensor& g1, const SiteTensor& g2,
                           const Eigen::MatrixXd& env_l, const Eigen::MatrixXd& env_r) {
        std::array<Eigen::MatrixXd, 4> win;
        for (int s = 0; s < 2; ++s)
            for (int t = 0; t < 2; ++t)
                win[2 * s + t] = g1[s] * g2[t];
        double num = 0.0, den = 0.0;
        for (int q = 0; q < 4; ++q) {
            const Eigen::MatrixXd m_q = env_l * win[q] * env_r;
            den += (win[q].array() * m_q.array()).sum();
            for (int p = 0; p < 4; ++p)
                if (h(p, q) != 0.0)
                    num += h(p, q) * (win[p].array() * m_q.array()).sum();
        }
        return num / den;
    };

    const Eigen::MatrixXd l_b = fp.left, r_b = fp.right;
    const Eigen::MatrixXd l_a = detail::transfer_left(pa, l_b);
    const Eigen::MatrixXd r_a = detail::transfer_right(pb, r_b);
    const double e_a = bond_energy(pa, pb, l_b, r_b);
    const double e_b = bond_energy(pb, pa, l_a, r_a);
    return 0.5 * (e_a + e_b);
}

inline Eigen::Matrix2d spin_operator(char axis) {
    Eigen::Matrix2d o;
    if (axis == 'z')
        o << 0.5, 0.0, 0.0, -0.5;
    else if (axis == 'x')
        o << 0.0, 0.5, 0.5, 0.0;
    else
        throw std::invalid_argument("spin_operator: axis must be 'x' or 'z'");
    return o;
}

// <S^a> averaged over the two sublattices (and each one separately)
struct SiteMean {
    double a = 0.0, b = 0.0;
    double mean() const { return 0.5 * (a + b); }
};

inline SiteMean site_expectation(const UnitCellMps& m, char axis,
                                 const TransferFixedPoint& fp) {
    const Eigen::Matrix2d op = spin_operator(axis);
    const SiteTensor pa = detail::left_form_a(m);
    const SiteTensor pb = detail::left_form_b(m);
    const Eigen::MatrixXd r_a = detail::transfer_right(pb, fp.right);
    const Eigen::MatrixXd l_a = detail::transfer_left(pa, fp.left);
    SiteMean out;
    {
        const Eigen::MatrixXd num = detail::transfer_left_op(pa, fp.left, op);
        const Eigen::MatrixXd den = detail::transfer_left(pa, fp.left);
        out.a = (num.array() * r_a.array()).sum() / (den.array() * r_a.array()).sum();
    }
    {
        const Eigen::MatrixXd num = detail::transfer_left_op(pb, l_a, op);
        const Eigen::MatrixXd den = detail::transfer_left(pb, l_a);
        out.b = (num.array() * fp.right.array()).sum() / (den.array() * fp.right.array()).sum();
    }
    return out;
}

// Connected correlators <S^a_0 S^a_n> - <S^a>^2 for all n = 1..n_max in one
// transfer sweep, averaged over both placements of the first operator.
inline std::vector<double> correlator_batch(const UnitCellMps& m, char axis, long n_max,
                                            const TransferFixedPoint* fp_in = nullptr) {
    const Eigen::Matrix2d op = spin_operator(axis);
    TransferFixedPoint fp_local;
    const TransferFixedPoint& fp = fp_in ? *fp_in : (fp_local = transfer_fixed_point(m));

    const SiteTensor pa = detail::left_form_a(m);
    const SiteTensor pb = detail::left_form_b(m);
    const SiteMean mu = site_expectation(m, axis, fp);

    // right environments, one per bond type
    const Eigen::MatrixXd r_b = fp.right;
    const Eigen::MatrixXd r_a = detail::transfer_right(pb, r_b);
    const Eigen::MatrixXd l_b = fp.left;
    const Eigen::MatrixXd l_a = detail::transfer_left(pa, l_b);

    std::vector<double> acc(static_cast<std::size_t>(n_max), 0.0);
    for (int start = 0; start < 2; ++start) {
        // start parity: 0 -> first operator on an A site, 1 -> on a B site
        Eigen::MatrixXd cur_op =
            start == 0 ? detail::transfer_left_op(pa, l_b, op)
                       : detail::transfer_left_op(pb, l_a, op);
        Eigen::MatrixXd cur_pl = start == 0 ? detail::transfer_left(pa, l_b)
                                            : detail::transfer_left(pb, l_a);
        const double mu0 = start == 0 ? mu.a : mu.b;
        for (long n = 1; n <= n_max; ++n) {
            const bool site_is_a = ((n + start) % 2 == 0);
            const SiteTensor& p = site_is_a ? pa : pb;
            const Eigen::MatrixXd& r_env = site_is_a ? r_a : r_b;
            const double mun = site_is_a ? mu.a : mu.b;
            const Eigen::MatrixXd num = detail::transfer_left_op(p, cur_op, op);
            const Eigen::MatrixXd den = detail::transfer_left(p, cur_pl);
            const double raw = (num.array() * r_env.array()).sum() /
                               (den.array() * r_env.array()).sum();
            acc[static_cast<std::size_t>(n - 1)] += 0.5 * (raw - mu0 * mun);
            cur_op = detail::transfer_left(p, cur_op);
            cur_pl = den;
        }
    }
    return acc;
}

inline double correlator(const UnitCellMps& m, char axis, long n,
                         const TransferFixedPoint* fp = nullptr) {
    if (n < 1)
        throw std::domain_error("correlator: requires n >= 1");
    return correlator_batch(m, axis, n, fp).back();
}

// ---- IMPS state file ----

inline void save_imps(const std::string& path, const UnitCellMps& m) {
    auto pack = [](const SiteTensor& g) {
        core::NamedArray a;
        a.dims = {2, g[0].rows(), g[0].cols()};
        a.data.reserve(2 * g[0].size());
        for (int s = 0; s < 2; ++s)
            for (Eigen::Index i = 0; i < g[s].rows(); ++i)
                for (Eigen::Index j = 0; j < g[s].cols(); ++j)
                    a.data.push_back(g[s](i, j));
        return a;
    };
    std::vector<core::NamedArray> arrays;
    arrays.push_back(pack(m.gamma_a));
    arrays.back().name = "gamma_a";
    arrays.push_back(pack(m.gamma_b));
    arrays.back().name = "gamma_b";
    core::NamedArray la{"lambda_a", {m.lambda_a.size()},
                        std::vector<double>(m.lambda_a.data(), m.lambda_a.data() + m.lambda_a.size())};
    core::NamedArray lb{"lambda_b", {m.lambda_b.size()},
                        std::vector<double>(m.lambda_b.data(), m.lambda_b.data() + m.lambda_b.size())};
    arrays.push_back(std::move(la));
    arrays.push_back(std::move(lb));

    nlohmann::json manifest = {{"format", "IMPS"},
                               {"version", 1},
                               {"chi", m.chi()},
                               {"delta", m.delta},
                               {"energy", m.energy}};
    core::save_container(path, manifest, arrays);
}

inline UnitCellMps load_imps(const std::string& path) {
    const auto c = core::load_container(path);
    if (c.manifest.at("format") != "IMPS")
        throw std::runtime_error("load_imps: not an IMPS file: " + path);
    if (c.manifest.at("version") != 1)
        throw std::runtime_error("load_imps: unsupported IMPS version in " + path);
    UnitCellMps m;
    m.delta = c.manifest.at("delta").get<double>();
    m.energy = c.manifest.at("energy").get<double>();
    auto unpack = [&](const std::string& name) {
        const auto& a = c.array(name);
        if (a.dims.size() != 3 || a.dims[0] != 2)
            throw std::runtime_error("load_imps: bad dims for " + name);
        SiteTensor g;
        const long rows = a.dims[1], cols = a.dims[2];
        for (int s = 0; s < 2; ++s) {
            g[s].resize(rows, cols);
            for (long i = 0; i < rows; ++i)
                for (long j = 0; j < cols; ++j)
                    g[s](i, j) = a.data[static_cast<std::size_t>((s * rows + i) * cols + j)];
        }
        return g;
    };
    m.gamma_a = unpack("gamma_a");
    m.gamma_b = unpack("gamma_b");
    const auto& la = c.array("lambda_a");
    const auto& lb = c.array("lambda_b");
    m.lambda_a = Eigen::Map<const Eigen::VectorXd>(la.data.data(), static_cast<long>(la.data.size()));
    m.lambda_b = Eigen::Map<const Eigen::VectorXd>(lb.data.data(), static_cast<long>(lb.data.size()));
    return m;
}

} // namespace fracspin::itebd
