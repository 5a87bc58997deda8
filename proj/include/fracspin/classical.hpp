#pragma once

// Classical fractional processes: fractional Gaussian noise (fGN), the
// generalized Bernoulli covariance family (gBP), a uniform covariance-model
// interface, the cumulative-variance engine, and two exact fGN samplers.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "fracspin/core/rng.hpp"

namespace fracspin::classical {

struct FgnParams {
    double sigma2 = 1.0;
    double hurst = 0.5;

    void validate() const {
        if (!(sigma2 > 0.0))
            throw std::domain_error("FgnParams: sigma2 must be positive");
        if (!(hurst > 0.0 && hurst < 1.0))
            throw std::domain_error("FgnParams: hurst must lie in (0,1)");
    }
};

struct GbpParams {
    double p = 0.5;  // state-1 probability
    double h = 0.75;
    double c = 0.1;

    void validate() const {
        if (!(p > 0.0 && p < 1.0) || !(h > 0.0 && h < 1.0) || !(c > 0.0))
            throw std::domain_error("GbpParams: need p,h in (0,1) and c > 0");
    }
    double sigma2() const { return p * (1.0 - p); }
};

// fGN auto-covariance C(n) = sigma^2/2 (|n+1|^2H - 2|n|^2H + |n-1|^2H)
inline double fgn_covariance(long n, const FgnParams& par) {
    if (n < 0)
        throw std::domain_error("fgn_covariance: requires n >= 0");
    if (n == 0)
        return par.sigma2;
    const double tw = 2.0 * par.hurst;
    const double a = std::pow(static_cast<double>(n + 1), tw);
    const double b = std::pow(static_cast<double>(n), tw);
    const double c = std::pow(static_cast<double>(n - 1), tw);
    return 0.5 * par.sigma2 * (a - 2.0 * b + c);
}

// large-n power law sigma^2 H(2H-1) n^(2H-2)
inline double fgn_covariance_asymptotic(long n, const FgnParams& par) {
    if (n < 1)
        throw std::domain_error("fgn_covariance_asymptotic: requires n >= 1");
    const double H = par.hurst;
    return par.sigma2 * H * (2.0 * H - 1.0) * std::pow(static_cast<double>(n), 2.0 * H - 2.0);
}

// gBP covariance c n^(2h-2), n >= 1
inline double gbp_covariance(long n, const GbpParams& par) {
    if (n < 1)
        throw std::domain_error("gbp_covariance: requires n >= 1");
    return par.c * std::pow(static_cast<double>(n), 2.0 * par.h - 2.0);
}

enum class CovKind { fgn, gbp, exact_xx_z, exact_xx_x, tabulated };

// Lag -> covariance with the metadata the variance engine needs.
struct CovarianceModel {
    CovKind kind = CovKind::tabulated;
    double sigma2 = 1.0;                     // C(0)
    std::function<double(long)> evaluate;    // defined for n >= 1
    std::string label;
};

inline CovarianceModel fgn_model(const FgnParams& par) {
    par.validate();
    return {CovKind::fgn, par.sigma2,
            [par](long n) { return fgn_covariance(n, par); },
            "fgn H=" + std::to_string(par.hurst)};
}

inline CovarianceModel gbp_model(const GbpParams& par) {
    par.validate();
    return {CovKind::gbp, par.sigma2(),
            [par](long n) { return gbp_covariance(n, par); },
            "gbp h=" + std::to_string(par.h)};
}

inline CovarianceModel tabulated_model(std::vector<double> cov, double sigma2,
                                       std::string label) {
    return {CovKind::tabulated, sigma2,
            [cov = std::move(cov)](long n) {
                if (n < 1 || n > static_cast<long>(cov.size()))
                    throw std::out_of_range("tabulated covariance: lag out of range");
                return cov[static_cast<std::size_t>(n - 1)];
            },
            std::move(label)};
}

// Var(B_t) = sigma^2 t + 2 sum_{i=1..t} sum_{j=1..t-i} C(j), evaluated for a
// whole increasing grid of t in one O(max t) pass over the lags. The
// staggered flag replaces C(j) by (-1)^j C(j). Kahan-compensated accumulation
// keeps the telescoping cases accurate to ~1e-12 relative.
inline std::vector<double> cumulative_variance_curve(const CovarianceModel& model,
                                                     const std::vector<long>& t_grid,
                                                     bool staggered = false) {
    std::vector<double> out;
    out.reserve(t_grid.size());
    long t_max = 0;
    for (long t : t_grid) {
        if (t < 1)
            throw std::domain_error("cumulative_variance: requires t >= 1");
        if (t < t_max)
            throw std::invalid_argument("cumulative_variance_curve: grid must be increasing");
        t_max = t;
    }
    double inner = 0.0, inner_c = 0.0;  // S1(m) = sum_{j<=m} (+-)^j C(j)
    double outer = 0.0, outer_c = 0.0;  // sum_{m'<m} S1(m')
    std::size_t gi = 0;
    for (long m = 0;; ++m) {
        while (gi < t_grid.size() && t_grid[gi] == m) {
            out.push_back(model.sigma2 * static_cast<double>(m) + 2.0 * outer);
            ++gi;
        }
        if (gi == t_grid.size())
            break;
        if (m >= 1) {
            double cj = model.evaluate(m);
            if (staggered && (m % 2 != 0))
                cj = -cj;
            const double y = cj - inner_c;
            const double t1 = inner + y;
            inner_c = (t1 - inner) - y;
            inner = t1;
        }
        const double y = inner - outer_c;
        const double t2 = outer + y;
        outer_c = (t2 - outer) - y;
        outer = t2;
    }
    return out;
}

inline double cumulative_variance(const CovarianceModel& model, long t,
                                  bool staggered = false) {
    return cumulative_variance_curve(model, {t}, staggered)[0];
}

// Hosking's recursion (Durbin-Levinson): exact finite-sample covariance,
// O(n^2) time, no need to know n in advance.
inline std::vector<double> sample_fgn_hosking(const FgnParams& par, long n,
                                              std::uint64_t seed) {
    par.validate();
    if (n < 1)
        throw std::domain_error("sample_fgn_hosking: requires n >= 1");
    core::RandomStream rng(seed);
    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> phi, phi_prev;
    std::vector<double> cov(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k)
        cov[static_cast<std::size_t>(k)] = fgn_covariance(k, par);

    double v = cov[0];
    x[0] = std::sqrt(v) * rng.next_normal();
    for (long t = 1; t < n; ++t) {
        const std::size_t m = static_cast<std::size_t>(t);
        phi_prev = phi;
        phi.assign(m, 0.0);
        double num = cov[m];
        for (std::size_t j = 0; j + 1 < m; ++j)
            num -= phi_prev[j] * cov[m - 1 - j];
        const double kappa = num / v;
        phi[m - 1] = kappa;
        for (std::size_t j = 0; j + 1 < m; ++j)
            phi[j] = phi_prev[j] - kappa * phi_prev[m - 2 - j];
        v *= (1.0 - kappa * kappa);
        if (!(v > 0.0))
            throw std::runtime_error("sample_fgn_hosking: innovation variance underflow");
        double mean = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            mean += phi[j] * x[m - 1 - j];
        x[m] = mean + std::sqrt(v) * rng.next_normal();
    }
    return x;
}

// Davies-Harte circulant embedding, O(n log n). Fails loudly if the
// circulant eigenvalues go negative (cannot happen for fGN with H in (0,1)).
inline std::vector<double> sample_fgn_daviesharte(const FgnParams& par, long n,
                                                  std::uint64_t seed) {
    par.validate();
    if (n < 1)
        throw std::domain_error("sample_fgn_daviesharte: requires n >= 1");
    std::size_t m = 2;
    while (m < 2 * static_cast<std::size_t>(n))
        m <<= 1;

    std::vector<std::complex<double>> row(m);
    for (std::size_t k = 0; k <= m / 2; ++k)
        row[k] = fgn_covariance(static_cast<long>(k), par);
    for (std::size_t k = m / 2 + 1; k < m; ++k)
        row[k] = row[m - k];

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> lambda(m);
    fft.fwd(lambda, row);

    double lmax = 0.0;
    for (const auto& l : lambda)
        lmax = std::max(lmax, std::abs(l.real()));
    for (const auto& l : lambda) {
        if (l.real() < -1e-12 * lmax)
            throw std::runtime_error(
                "sample_fgn_daviesharte: negative circulant eigenvalue " +
                std::to_string(l.real()) + " (embedding failure)");
    }

    core::RandomStream rng(seed);
    std::vector<std::complex<double>> w(m);
    const double dm = static_cast<double>(m);
    w[0] = std::sqrt(std::max(0.0, lambda[0].real()) / dm) * rng.next_normal();
    w[m / 2] = std::sqrt(std::max(0.0, lambda[m / 2].real()) / dm) * rng.next_normal();
    for (std::size_t k = 1; k < m / 2; ++k) {
        const double s = std::sqrt(std::max(0.0, lambda[k].real()) / (2.0 * dm));
        const double a = rng.next_normal();
        const double b = rng.next_normal();
        w[k] = std::complex<double>(s * a, s * b);
        w[m - k] = std::conj(w[k]);
    }
    std::vector<std::complex<double>> y(m);
    fft.fwd(y, w);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k)
        x[static_cast<std::size_t>(k)] = y[static_cast<std::size_t>(k)].real();
    return x;
}

} // namespace fracspin::classical
