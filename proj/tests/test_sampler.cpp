#include <catch2/catch_amalgamated.hpp>

#include "fracspin/sampler.hpp"
#include "fracspin/xx_exact.hpp"
#include "support/ed.hpp"

#include <cmath>
#include <map>

using namespace fracspin;
using namespace fracspin::sampler;

namespace {

const itebd::UnitCellMps& xx_state() {
    static itebd::UnitCellMps m = itebd::itebd_ground_state({0.0, 1.0}, 16);
    return m;
}

double empirical_lag_cov(const Trajectory& t, long lag) {
    // covariance of the spin values s_k/2
    double mu = 0.0;
    for (auto s : t.symbols)
        mu += 0.5 * s;
    mu /= static_cast<double>(t.symbols.size());
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < t.symbols.size(); ++i)
        acc += (0.5 * t.symbols[i] - mu) * (0.5 * t.symbols[i + lag] - mu);
    return acc / static_cast<double>(t.symbols.size() - lag);
}

} // namespace

TEST_CASE("magnetization series", "[sampler]") {
    Trajectory all_up;
    all_up.symbols.assign(6, 1);
    const auto mu = magnetization_series(all_up, false);
    for (std::size_t l = 0; l < 6; ++l)
        CHECK(mu[l] == 0.5 * static_cast<double>(l + 1));
    const auto ns = magnetization_series(all_up, true);
    for (std::size_t l = 0; l < 6; ++l)
        CHECK(ns[l] == ((l % 2 == 0) ? -0.5 : 0.0));

    Trajectory neel;  // up down up down ...
    for (int k = 0; k < 6; ++k)
        neel.symbols.push_back(k % 2 == 0 ? 1 : -1);
    const auto nn = magnetization_series(neel, true);
    for (std::size_t l = 0; l < 6; ++l)
        CHECK(std::abs(nn[l]) == 0.5 * static_cast<double>(l + 1));
}

TEST_CASE("finite mps sampling: singlet and product states", "[sampler]") {
    // singlet (|ud> - |du>)/sqrt2
    Eigen::VectorXd singlet(4);
    singlet << 0.0, 1.0, -1.0, 0.0;
    const auto mps = mps_from_statevector(singlet, 2);
    const auto samples = sample_finite_mps(mps, 4000, 99);
    int ud = 0, du = 0;
    for (const auto& t : samples) {
        REQUIRE(t.symbols[0] == -t.symbols[1]);  // perfect anticorrelation
        (t.symbols[0] == 1 ? ud : du)++;
    }
    CHECK(std::abs(ud - du) < 4 * std::sqrt(4000.0 / 4));

    // product |uu>: single outcome
    Eigen::VectorXd up(4);
    up << 1.0, 0.0, 0.0, 0.0;
    for (const auto& t : sample_finite_mps(mps_from_statevector(up, 2), 100, 1)) {
        CHECK(t.symbols[0] == 1);
        CHECK(t.symbols[1] == 1);
    }
}

TEST_CASE("finite mps sampling matches the exact Born distribution", "[sampler]") {
    // L=8 XXZ ground state; brute-force oracle over all 256 outcomes
    const int L = 8;
    const auto ed = edtest::xxz_dense_ground(L, 0.5, false);
    const auto mps = mps_from_statevector(ed.vec, L);

    // chain rule: product of conditionals equals the direct Born probability
    for (long idx : {0L, 37L, 85L, 170L, 255L}) {
        std::vector<int> config;
        for (int i = 0; i < L; ++i)
            config.push_back(((idx >> (L - 1 - i)) & 1) ? -1 : 1);
        const double direct = finite_mps_probability(mps, config);
        const double exact = ed.vec(idx) * ed.vec(idx);
        CHECK_THAT(direct, Catch::Matchers::WithinAbs(exact, 1e-12));
    }

    const int n_samples = 200000;
    const auto samples = sample_finite_mps(mps, n_samples, 4242);
    std::vector<double> freq(1 << L, 0.0);
    for (const auto& t : samples) {
        long idx = 0;
        for (int i = 0; i < L; ++i)
            idx = (idx << 1) | (t.symbols[i] == 1 ? 0 : 1);
        freq[idx] += 1.0 / n_samples;
    }
    double tv = 0.0;
    for (long idx = 0; idx < (1 << L); ++idx)
        tv += std::abs(freq[idx] - ed.vec(idx) * ed.vec(idx));
    CHECK(0.5 * tv <= 0.03);
}

TEST_CASE("infinite sampler: determinism and conditionals", "[sampler]") {
    const auto& m = xx_state();
    InfiniteSampler s(m, Basis::z);

    const auto a = s.sample(512, 7);
    const auto b = s.sample(512, 7);
    CHECK(a.symbols == b.symbols);
    CHECK(a.basis == Basis::z);
    CHECK(a.delta == 0.0);
    const auto c = s.sample(512, 8);
    CHECK(a.symbols != c.symbols);

    // no conditioning: P(up) = P(down) = 1/2 by the zero-magnetization sector
    auto cond = s.initial_state();
    const Eigen::Matrix2d rho = s.conditional_density(cond);
    CHECK_THAT(rho(0, 0), Catch::Matchers::WithinAbs(0.5, 1e-6));
    CHECK_THAT(rho.trace(), Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(rho(0, 1), Catch::Matchers::WithinAbs(rho(1, 0), 1e-14));

    // joint P(up, up) = 1/4 + C_z(1)
    s.advance(cond, 0);
    const Eigen::Matrix2d rho2 = s.conditional_density(cond);
    const double joint = rho(0, 0) * rho2(0, 0);
    CHECK_THAT(joint, Catch::Matchers::WithinAbs(0.25 + xx_exact::cz_exact(1), 2e-3));

    // chain-rule consistency against the batch correlator route:
    // P(up,up) + P(dn,dn) - P(up,dn) - P(dn,up) = 4 <S^z_0 S^z_1>
    s.advance(cond, 0);  // extend; probabilities must keep normalizing
    CHECK_THAT(s.conditional_density(cond).trace(), Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("infinite sampler statistics at the XX point", "[sampler]") {
    const auto& m = xx_state();
    const long n = 400000;
    const auto t = sample_infinite_mps(m, n, 2024, Basis::z);

    double mean = 0.0;
    for (auto s : t.symbols)
        mean += 0.5 * s;
    mean /= static_cast<double>(n);
    CHECK(std::abs(mean) < 3.0 * 0.5 / std::sqrt(static_cast<double>(n)));

    const double se = 0.25 / std::sqrt(static_cast<double>(n));
    CHECK_THAT(empirical_lag_cov(t, 1), Catch::Matchers::WithinAbs(xx_exact::cz_exact(1), 3 * se + 2e-3));
    CHECK_THAT(empirical_lag_cov(t, 2), Catch::Matchers::WithinAbs(0.0, 3 * se + 2e-3));

    // x basis: empirical C_x(1) within 3 standard errors of the exact value
    const auto tx = sample_infinite_mps(m, n, 2025, Basis::x);
    CHECK_THAT(empirical_lag_cov(tx, 1), Catch::Matchers::WithinAbs(xx_exact::cx_exact(1), 3 * se + 2e-3));
    CHECK_THAT(empirical_lag_cov(tx, 2), Catch::Matchers::WithinAbs(xx_exact::cx_exact(2), 3 * se + 2e-3));
}

TEST_CASE("trajectory csv round trip", "[sampler][io]") {
    const auto& m = xx_state();
    const auto t = sample_infinite_mps(m, 64, 5, Basis::x);
    save_trajectory_csv("/tmp/fracspin_traj.csv", t, m.chi());
    const auto u = load_trajectory_csv("/tmp/fracspin_traj.csv");
    CHECK(u.symbols == t.symbols);
    CHECK(u.basis == t.basis);
    CHECK(u.seed == t.seed);
    CHECK(u.delta == t.delta);
}
