#pragma once

// Special functions and partial-sum asymptotics: generalized harmonic and
// Dirichlet partial sums, digamma/trigamma, Riemann zeta on the real line,
// and alternating power sums with their large-n expansions.

#include <cmath>
#include <stdexcept>
#include <string>

namespace fracspin::specfun {

inline constexpr double euler_gamma = 0.577215664901532860606512090082;
inline constexpr double pi = 3.141592653589793238462643383280;

// psi^(m)(x) for m in {0,1}: upward recurrence to x >= 12, then the
// Bernoulli asymptotic series. Uniformly ~1e-14 relative over x > 0.
inline double polygamma(int m, double x) {
    if (x <= 0.0)
        throw std::domain_error("polygamma: requires x > 0, got x=" + std::to_string(x));
    if (m != 0 && m != 1)
        throw std::invalid_argument("polygamma: only m in {0,1} supported");

    double acc = 0.0;
    while (x < 12.0) {
        if (m == 0)
            acc -= 1.0 / x;
        else
            acc += 1.0 / (x * x);
        x += 1.0;
    }
    const double w = 1.0 / (x * x);
    if (m == 0) {
        // ln x - 1/(2x) - sum B_2k / (2k x^2k)
        double series = w * (1.0 / 12 - w * (1.0 / 120 - w * (1.0 / 252 - w * (1.0 / 240 - w * (1.0 / 132 - w * 691.0 / 32760)))));
        return acc + std::log(x) - 0.5 / x - series;
    }
    // 1/x + 1/(2x^2) + sum B_2k x^{-2k-1}
    double series = (1.0 / x) * w * (1.0 / 6 - w * (1.0 / 30 - w * (1.0 / 42 - w * (1.0 / 30 - w * (5.0 / 66 - w * 691.0 / 2730)))));
    return acc + 1.0 / x + 0.5 * w + series;
}

// H_n^(a) = sum_{k=1..n} k^-a, summed smallest-term first with Kahan
// compensation; accurate to ~1 ulp so downstream identities hold at 1e-13.
inline double harmonic_partial(long n, double a) {
    if (n < 1)
        throw std::domain_error("harmonic_partial: requires n >= 1");
    double s = 0.0, c = 0.0;
    for (long k = n; k >= 1; --k) {
        const double y = std::pow(static_cast<double>(k), -a) - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

// D_n^(a) = sum_{k=1..n} (-1)^(k-1) k^-a.
inline double dirichlet_partial(long n, double a) {
    if (n < 1)
        throw std::domain_error("dirichlet_partial: requires n >= 1");
    double s = 0.0, c = 0.0;
    for (long k = n; k >= 1; --k) {
        double y = std::pow(static_cast<double>(k), -a);
        if (k % 2 == 0)
            y = -y;
        y -= c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

// zeta(s) on the real line (s != 1). The Euler-Maclaurin tail continues
// analytically down to s > -4.5; further left use the reflection
// zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s). Accuracy ~1e-13;
// only isolated evaluations are ever needed.
inline double riemann_zeta(double s) {
    if (s == 1.0)
        return std::numeric_limits<double>::infinity();
    if (s < -4.5) {
        const double refl = std::pow(2.0, s) * std::pow(pi, s - 1.0) *
                            std::sin(0.5 * pi * s) * std::tgamma(1.0 - s);
        return refl * riemann_zeta(1.0 - s);
    }
    const int N = 24;
    double sum = 0.0;
    for (int k = N; k >= 1; --k)
        sum += std::pow(static_cast<double>(k), -s);
    const double Np = static_cast<double>(N);
    double tail = std::pow(Np, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(Np, -s);
    // B_2k / (2k)! for 2k = 2..12
    static constexpr double b_fact[] = {1.0 / 12, -1.0 / 720, 1.0 / 30240,
                                        -1.0 / 1209600, 1.0 / 47900160,
                                        -691.0 / 1307674368000.0};
    double rising = s;                     // s (s+1) ... (s+2j-2)
    double npow = std::pow(Np, -s - 1.0);  // N^(-s-2j+1)
    for (int j = 0; j < 6; ++j) {
        tail += b_fact[j] * rising * npow;
        rising *= (s + 2 * j + 1) * (s + 2 * j + 2);
        npow /= Np * Np;
    }
    return sum + tail;
}

// C1 in the large-n form of sum (-1)^k k^p: (2^(p+1)-1) zeta(-p) for p != -1.
// At p = -1 the zeta pole cancels against the vanishing prefactor and the
// limit is -ln 2 (the sum itself tends to -ln 2).
inline double alternating_power_sum_constant(double p) {
    if (p == -1.0)
        return -std::log(2.0);
    return (std::pow(2.0, p + 1.0) - 1.0) * riemann_zeta(-p);
}

// Coefficients of the large-n expansion
//   sum_{k=1..n} (-1)^k k^p = (-1)^n [ (1/2) n^p + (p/4) n^(p-1) ] + C1 + O(n^(p-3))
struct AltSumAsymptotics {
    double leading_coefficient = 0.5;
    double subleading_coefficient = 0.0; // p/4
    double constant_C1 = 0.0;
    double power_p = 0.0;
};

inline AltSumAsymptotics alt_sum_asymptotics(double p) {
    return {0.5, 0.25 * p, alternating_power_sum_constant(p), p};
}

// Exact sum_{k=1..n} (-1)^k k^p by direct summation.
inline double alternating_power_sum(long n, double p) {
    if (n < 1)
        throw std::domain_error("alternating_power_sum: requires n >= 1");
    double s = 0.0;
    for (long k = n; k >= 1; --k) {
        const double t = std::pow(static_cast<double>(k), p);
        s += (k % 2 == 0) ? t : -t;
    }
    return s;
}

// Companion asymptotic form of the same sum.
inline double alternating_power_sum_asymptotic(long n, double p) {
    if (n < 1)
        throw std::domain_error("alternating_power_sum_asymptotic: requires n >= 1");
    const double np = std::pow(static_cast<double>(n), p);
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return sign * 0.5 * (np + 0.5 * p * np / static_cast<double>(n)) +
           alternating_power_sum_constant(p);
}

// Direct summation is exact up to ~1e6 terms; beyond that the asymptotic
// form is already below its own remainder, so switch over.
inline double alternating_power_sum_auto(long n, double p) {
    constexpr long kDirectLimit = 1000000;
    if (n <= kDirectLimit)
        return alternating_power_sum(n, p);
    return alternating_power_sum_asymptotic(n, p);
}

} // namespace fracspin::specfun
