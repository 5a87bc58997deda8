#pragma once

// Exact XX-point (Delta = 0) spin-spin covariances and closed-form domain
// magnetization variances. These are the gold-standard references the tensor
// network and sampling layers are validated against.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fracspin/classical.hpp"
#include "fracspin/specfun.hpp"

namespace fracspin::xx_exact {

using specfun::euler_gamma;
using specfun::pi;

// C_z(n) = [(-1)^n - 1] / (2 pi^2 n^2); single-site variance 1/4 at n = 0.
inline double cz_exact(long n) {
    if (n < 0)
        throw std::domain_error("cz_exact: requires n >= 0");
    if (n == 0)
        return 0.25;
    if (n % 2 == 0)
        return 0.0;
    const double dn = static_cast<double>(n);
    return -1.0 / (pi * pi * dn * dn);
}

namespace detail {
// log of prod_{k=1..q} Gamma(k)^2 / (Gamma(k-1/2) Gamma(k+1/2))
inline double log_gamma_product(long q) {
    double s = 0.0;
    for (long k = 1; k <= q; ++k)
        s += 2.0 * std::lgamma(static_cast<double>(k)) -
             std::lgamma(k - 0.5) - std::lgamma(k + 0.5);
    return s;
}
} // namespace detail

// C_x(n) evaluated in log-gamma space; sign (-1)^n, magnitude ~ n^(-1/2).
inline double cx_exact(long n) {
    if (n < 0)
        throw std::domain_error("cx_exact: requires n >= 0");
    if (n == 0)
        return 0.25;
    const double lp = detail::log_gamma_product(n / 2) +
                      detail::log_gamma_product((n + 1) / 2);
    const double mag = 0.25 * std::exp(lp);
    return (n % 2 == 0) ? mag : -mag;
}

// All lags 1..n_max in one sweep with a running log product.
inline std::vector<double> cx_exact_range(long n_max) {
    std::vector<double> out(static_cast<std::size_t>(n_max));
    double lp_lo = 0.0; // log product up to n/2
    double lp_hi = 0.0; // log product up to (n+1)/2
    for (long n = 1; n <= n_max; ++n) {
        const long q_lo = n / 2, q_hi = (n + 1) / 2;
        if (q_hi >= 1 && q_hi > (n - 1 + 1) / 2)
            lp_hi += 2.0 * std::lgamma(static_cast<double>(q_hi)) -
                     std::lgamma(q_hi - 0.5) - std::lgamma(q_hi + 0.5);
        if (q_lo >= 1 && q_lo > (n - 1) / 2)
            lp_lo += 2.0 * std::lgamma(static_cast<double>(q_lo)) -
                     std::lgamma(q_lo - 0.5) - std::lgamma(q_lo + 0.5);
        const double mag = 0.25 * std::exp(lp_lo + lp_hi);
        out[static_cast<std::size_t>(n - 1)] = (n % 2 == 0) ? mag : -mag;
    }
    return out;
}

// Direct Gamma-product evaluation; overflows beyond n ~ 300, used as an
// independent cross-check of the log-space route at small n.
inline double cx_exact_direct(long n) {
    if (n < 1)
        throw std::domain_error("cx_exact_direct: requires n >= 1");
    auto prod = [](long q) {
        double p = 1.0;
        for (long k = 1; k <= q; ++k)
            p *= std::tgamma(static_cast<double>(k)) * std::tgamma(static_cast<double>(k)) /
                 (std::tgamma(k - 0.5) * std::tgamma(k + 0.5));
        return p;
    };
    const double mag = 0.25 * prod(n / 2) * prod((n + 1) / 2);
    return (n % 2 == 0) ? mag : -mag;
}

inline classical::CovarianceModel cz_model() {
    return {classical::CovKind::exact_xx_z, 0.25,
            [](long n) { return cz_exact(n); }, "xx-exact-z"};
}

inline classical::CovarianceModel cx_model(long n_max) {
    auto table = cx_exact_range(n_max);
    return {classical::CovKind::exact_xx_x, 0.25,
            [table = std::move(table)](long n) {
                if (n < 1 || n > static_cast<long>(table.size()))
                    throw std::out_of_range("cx_model: lag out of tabulated range");
                return table[static_cast<std::size_t>(n - 1)];
            },
            "xx-exact-x"};
}

// Constant term of 2 pi^2 V_l^z - 2 ln l: equals 2(gamma+1) + ln 4
// = 4.540725691..., fixed by the free-fermion number-fluctuation result
// (1/pi^2)[ln l + ln 2 + gamma + 1] and confirmed by the double-sum oracle.
inline double uniform_z_asymptotic_constant() {
    return 2.0 * (euler_gamma + 1.0) + 2.0 * std::log(2.0);
}

// Exact V_l^z = <M_z^2(l)> for even l. The exact increment is
//   V_m - V_{m-1} = psi1(m/2) / (2 pi^2)        (m odd)
//   V_m - V_{m-1} = psi1((m+1)/2) / (2 pi^2)    (m even),
// always at half-integer arguments. Summing both parities gives, with L = l/2,
//   V_l = (1/2pi^2) [ (L-1/2) psi1(L+1/2) + (L+1/2) psi1(L+3/2)
//                     + psi0(L+1/2) + psi0(L+3/2) + 2 gamma + 4 ln 2 ].
// This matches the brute-force double sum of cz_exact to machine precision.
inline double variance_uniform_z_closed(long l) {
    if (l < 2 || l % 2 != 0)
        throw std::domain_error(
            "variance_uniform_z_closed: closed form needs even l >= 2 "
            "(use variance_numeric for odd l)");
    const double L = 0.5 * static_cast<double>(l);
    const double bracket = (L - 0.5) * specfun::polygamma(1, L + 0.5) +
                           (L + 0.5) * specfun::polygamma(1, L + 1.5) +
                           specfun::polygamma(0, L + 0.5) + specfun::polygamma(0, L + 1.5) +
                           2.0 * euler_gamma + 4.0 * std::log(2.0);
    return bracket / (2.0 * pi * pi);
}

// Large-l form (2 ln l + 4.540725691 - 1/(3 l^2) + O(l^-4)) in the same
// 1/(2 pi^2) normalization the exact bracket carries.
inline double variance_uniform_z_asymptotic(long l) {
    if (l < 1)
        throw std::domain_error("variance_uniform_z_asymptotic: requires l >= 1");
    const double dl = static_cast<double>(l);
    const double bracket = 2.0 * std::log(dl) + uniform_z_asymptotic_constant() -
                           1.0 / (3.0 * dl * dl);
    return bracket / (2.0 * pi * pi);
}

// W_l^z = <N_z^2(l)> = l/2 - V_l^z; the polygamma terms cancel in W + V.
inline double variance_staggered_z_closed(long l) {
    return 0.5 * static_cast<double>(l) - variance_uniform_z_closed(l);
}

inline double variance_staggered_z_asymptotic(long l) {
    return 0.5 * static_cast<double>(l) - variance_uniform_z_asymptotic(l);
}

// sigma^2 l + 2 sum sum (+-1)^j C(j) with whatever model is supplied.
inline double variance_numeric(const classical::CovarianceModel& model, long l,
                               bool staggered = false) {
    return classical::cumulative_variance(model, l, staggered);
}

inline std::vector<double> variance_numeric_curve(const classical::CovarianceModel& model,
                                                  const std::vector<long>& grid,
                                                  bool staggered = false) {
    return classical::cumulative_variance_curve(model, grid, staggered);
}

// U(1) sum rule: <(S^z)^2> + 2 sum_{n<=n_max} C(n); tends to 0 for the
// z-covariance of a zero-magnetization state, stays at sigma^2 otherwise.
inline double sum_rule_check(const classical::CovarianceModel& model, long n_max) {
    double acc = 0.0;
    for (long n = n_max; n >= 1; --n)
        acc += model.evaluate(n);
    return model.sigma2 + 2.0 * acc;
}

} // namespace fracspin::xx_exact
