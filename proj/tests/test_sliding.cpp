#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "pointing/sliding.hpp"

using namespace pointing;
using namespace pointing::sliding;
using model::PlantParams;
using model::PlantState;

namespace {

// sigma2 one sample later, after applying u on the disturbance-free Euler plant.
double next_sigma2(const PlantParams& p, const PlantState& s, double u, const FtsmGains& g,
                   double r1, double r2, double r3, double d = 0.0) {
    const PlantState next = model::euler_step(p, s, u, d, g.T);
    return compute_surfaces(next, {r1, r2, r3}, g).sigma2;
}

}  // namespace

TEST_CASE("odd_pow examples") {
    CHECK(odd_pow(0.0, 7, 9) == 0.0);
    CHECK(odd_pow(-8.0, 1, 3) == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(odd_pow(0.5, 7, 9) == doctest::Approx(oracle::real_root_power(0.5, 7, 9)).epsilon(1e-14));
    CHECK(odd_pow(0.5, 7, 9) == doctest::Approx(0.583265).epsilon(1e-6));
    CHECK(odd_pow(1.0, 7, 9) == 1.0);
    CHECK(odd_pow(-1.0, 3, 5) == -1.0);
}

TEST_CASE("odd_pow properties") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mag(-6, 3);
    const int pairs[][2] = {{1, 3}, {3, 5}, {5, 7}, {7, 9}, {1, 5}, {3, 7}, {5, 9}};
    for (const auto& qp : pairs) {
        for (int i = 0; i < 300; ++i) {
            const double x = std::pow(10.0, mag(rng));
            const double y = x * (1.0 + std::uniform_real_distribution<double>(1e-6, 1.0)(rng));
            CHECK(odd_pow(-x, qp[0], qp[1]) == -odd_pow(x, qp[0], qp[1]));
            CHECK(odd_pow(x, qp[0], qp[1]) < odd_pow(y, qp[0], qp[1]));
            CHECK(odd_pow(-y, qp[0], qp[1]) < odd_pow(-x, qp[0], qp[1]));
            CHECK(odd_pow(x, qp[0], qp[1]) ==
                  doctest::Approx(oracle::real_root_power(x, qp[0], qp[1])).epsilon(1e-13));
        }
        double prev = 1.0;
        for (double eps = 1e-2; eps > 1e-300; eps *= 1e-10) {
            const double v = odd_pow(eps, qp[0], qp[1]);
            CHECK(v < prev);
            prev = v;
        }
        CHECK(prev < 1e-50);  // continuous at 0
    }
}

TEST_CASE("sign convention") {
    CHECK(sign(2.0) == 1.0);
    CHECK(sign(-1e-300) == -1.0);
    CHECK(sign(0.0) == 0.0);
    CHECK(std::isnan(sign(std::nan(""))));
}

TEST_CASE("compute_surfaces") {
    const FtsmGains g;  // alpha=1, beta=2, q1=7, p1=9, T=0.01

    const double r0 = 3.0, r1 = 3.5;
    const auto on = compute_surfaces({r0, (r1 - r0) / g.T}, {r0, r1, 4.0}, g);
    CHECK(on.sigma1 == 0.0);
    CHECK(on.delta_sigma1 == 0.0);
    CHECK(on.sigma2 == 0.0);

    const auto above = compute_surfaces({11, 0}, {10, 10, 10}, g);
    CHECK(above.sigma1 == 1.0);
    CHECK(above.delta_sigma1 == 0.0);
    CHECK(above.sigma2 == 3.0);

    const auto below = compute_surfaces({9, 0}, {10, 10, 10}, g);
    CHECK(below.sigma1 == -1.0);
    CHECK(below.sigma2 == -3.0);
}

TEST_CASE("ftsm_control on the reference gain set") {
    const FtsmGains g;
    const PlantParams p = model::kElevationPlant;

    SUBCASE("holding input on a constant reference") {
        const double u = ftsm_control({10, 0}, {10, 10, 10}, p, g);
        CHECK(u == doctest::Approx(p.a2 * 10 / p.b0).epsilon(1e-14));
    }
    SUBCASE("sigma2 = 3 maps to 0.3*3 - 0.1 = 0.8") {
        const PlantState s{11, 0};
        CHECK(compute_surfaces(s, {10, 10, 10}, g).sigma2 == 3.0);
        const double u = ftsm_control(s, {10, 10, 10}, p, g);
        CHECK(next_sigma2(p, s, u, g, 10, 10, 10) == doctest::Approx(0.8).epsilon(1e-12));
    }
    SUBCASE("one-step map on random off-surface states") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> v(-40, 40);
        for (int i = 0; i < 2000; ++i) {
            const PlantState s{v(rng), 10 * v(rng)};
            const double r[4] = {v(rng), v(rng), v(rng), v(rng)};
            const double sigma = compute_surfaces(s, {r[0], r[1], r[2]}, g).sigma2;
            const double u = ftsm_control(s, {r[0], r[1], r[2]}, p, g);
            const double got = next_sigma2(p, s, u, g, r[1], r[2], r[3]);
            const double want = oracle::surface_recursion(sigma, g.Phi, g.K, g.T);
            // rounding floor scaled to the largest term entering sigma2
            const double floor = 1e-12 * (std::abs(s.x2) + 80.0 / g.T);
            CHECK(std::abs(got - want) <= 1e-9 * std::abs(want) + floor);
        }
    }
}

TEST_CASE("tsm_control reaches the surface at slope K T") {
    const FtsmGains g;
    const PlantParams p = model::kAzimuthPlant;
    const FtsmGains tg = tsm_gains(g);
    CHECK(tg.alpha == 0.0);
    CHECK(tg.Phi == 0.0);

    // sigma2 = x2 + 2*odd_pow(sigma1) with alpha = 0
    const PlantState up{11, 1};
    CHECK(compute_surfaces(up, {10, 10, 10}, tg).sigma2 == 3.0);
    const double u_up = tsm_control(up, {10, 10, 10}, p, g);
    CHECK(next_sigma2(p, up, u_up, tg, 10, 10, 10) == doctest::Approx(2.9).epsilon(1e-12));

    const PlantState down{9, -1};
    const double u_down = tsm_control(down, {10, 10, 10}, p, g);
    CHECK(next_sigma2(p, down, u_down, tg, 10, 10, 10) == doctest::Approx(-2.9).epsilon(1e-12));

    CHECK(tsm_control({10, 0}, {10, 10, 10}, p, g) ==
          doctest::Approx(ftsm_control({10, 0}, {10, 10, 10}, p, g)).epsilon(1e-14));
}

TEST_CASE("surface recursion holds exactly for random gains, plants and references") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0, 1);
    const int pairs[][2] = {{1, 3}, {3, 5}, {5, 7}, {7, 9}, {1, 5}, {3, 7}};
    const double periods[] = {0.001, 0.005, 0.01};
    for (int trial = 0; trial < 60; ++trial) {
        FtsmGains g;
        g.T = periods[trial % 3];
        g.alpha = 0.1 + 10 * unit(rng);
        g.beta = 0.1 + 10 * unit(rng);
        g.q1 = pairs[trial % 6][0];
        g.p1 = pairs[trial % 6][1];
        g.K = 0.5 + 50 * unit(rng);
        g.Phi = (0.05 + 0.9 * unit(rng)) / g.T;
        REQUIRE_NOTHROW(validate(g));
        const PlantParams p{1000 + 4000 * unit(rng), 10 + 90 * unit(rng), 1000 + 4000 * unit(rng)};
        const double amp = 1 + 40 * unit(rng);
        const double freq = 0.2 + 3 * unit(rng);
        const bool sine = trial % 2 == 0;
        auto ref = [&](int n) { return sine ? amp * std::sin(2 * M_PI * freq * n * g.T) : amp; };

        PlantState s{0, 0};
        for (int n = 0; n < 300; ++n) {
            const ReferenceWindow w{ref(n), ref(n + 1), ref(n + 2)};
            const double sigma = compute_surfaces(s, w, g).sigma2;
            const double u = ftsm_control(s, w, p, g);
            s = model::euler_step(p, s, u, 0, g.T);
            const double got = compute_surfaces(s, {ref(n + 1), ref(n + 2), ref(n + 3)}, g).sigma2;
            const double want = oracle::surface_recursion(sigma, g.Phi, g.K, g.T);
            const double floor = 1e-12 * (std::abs(s.x2) + amp / g.T);
            CHECK(std::abs(got - want) <= 1e-9 * std::abs(want) + floor);
        }
    }
}

TEST_CASE("linearized terminal derivative only approximates the recursion") {
    const FtsmGains g;
    const PlantParams p = model::kElevationPlant;
    FtsmOptions lin;
    lin.terminal = TerminalDerivative::Linearized;
    PlantState s{0, 0};
    double worst = 0.0;
    for (int n = 0; n < 300; ++n) {
        const double sigma = compute_surfaces(s, {10, 10, 10}, g).sigma2;
        const double u = ftsm_control(s, {10, 10, 10}, p, g, std::nullopt, lin);
        s = model::euler_step(p, s, u, 0, g.T);
        const double got = compute_surfaces(s, {10, 10, 10}, g).sigma2;
        worst = std::max(worst, oracle::rel_err(got, oracle::surface_recursion(sigma, g.Phi, g.K, g.T)));
    }
    CHECK(worst > 1e-6);
    CHECK(std::abs(s.x1 - 10) < 0.01);
}

TEST_CASE("linearized terminal term is saturated and zeroed near the singularity") {
    const FtsmGains g;
    const PlantParams p = model::kElevationPlant;
    FtsmOptions lin;
    lin.terminal = TerminalDerivative::Linearized;

    auto manual = [&](const PlantState& s, double terminal) {
        const auto sf = compute_surfaces(s, {0, 0, 0}, g);
        const double u0 = -p.a2 * s.x1 - p.a1 * s.x2 + g.alpha * sf.delta_sigma1 + terminal +
                          g.Phi * sf.sigma2 + g.K * oracle::sgn(sf.sigma2);
        return -u0 / p.b0;
    };
    // 2 * (7/9) * (1e-8)^(-2/9) * 1000 is ~9e4, well above the 1e4 cap
    const PlantState near{1e-8, 1000};
    CHECK(ftsm_control(near, {0, 0, 0}, p, g, std::nullopt, lin) ==
          doctest::Approx(manual(near, 1e4)).epsilon(1e-14));
    const PlantState at{1e-13, 1000};
    CHECK(ftsm_control(at, {0, 0, 0}, p, g, std::nullopt, lin) ==
          doctest::Approx(manual(at, 0.0)).epsilon(1e-14));
    const PlantState far{2.0, -3.0};
    const double expect = 2 * (7.0 / 9) * std::pow(2.0, -2.0 / 9) * -3.0;
    CHECK(ftsm_control(far, {0, 0, 0}, p, g, std::nullopt, lin) ==
          doctest::Approx(manual(far, expect)).epsilon(1e-13));

    // The default forward difference stays finite at sigma1 = 0 with a large rate.
    CHECK(std::isfinite(ftsm_control({0, 1e4}, {0, 0, 0}, p, g)));
}

TEST_CASE("prev_sigma1 switches to a history-based rate estimate") {
    const FtsmGains g;
    const PlantParams p = model::kElevationPlant;
    const PlantState s{7, 15};
    const ReferenceWindow w{10, 10.2, 10.4};
    const auto sf = compute_surfaces(s, w, g);
    const double consistent_prev = sf.sigma1 - g.T * sf.delta_sigma1;
    CHECK(ftsm_control(s, w, p, g, consistent_prev) ==
          doctest::Approx(ftsm_control(s, w, p, g)).epsilon(1e-12));
    CHECK(ftsm_control(s, w, p, g, sf.sigma1) != doctest::Approx(ftsm_control(s, w, p, g)));
}

TEST_CASE("odd symmetry of surfaces and feedback with zero reference") {
    const FtsmGains g;
    const PlantParams p = model::kAzimuthPlant;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> v(-20, 20);
    for (int i = 0; i < 500; ++i) {
        const PlantState s{v(rng), 5 * v(rng)};
        const PlantState neg{-s.x1, -s.x2};
        const auto a = compute_surfaces(s, {}, g);
        const auto b = compute_surfaces(neg, {}, g);
        CHECK(b.sigma1 == -a.sigma1);
        CHECK(b.sigma2 == doctest::Approx(-a.sigma2).epsilon(1e-14));
        CHECK(ftsm_control(neg, {}, p, g) == doctest::Approx(-ftsm_control(s, {}, p, g)).epsilon(1e-12));
        CHECK(tsm_control(neg, {}, p, g) == doctest::Approx(-tsm_control(s, {}, p, g)).epsilon(1e-12));
    }
}

TEST_CASE("continuous_ftsm_control") {
    const FtsmGains g;
    const PlantParams p = model::kElevationPlant;
    CHECK(continuous_ftsm_control({0, 0}, 0, 0, 0, p, g) == 0.0);
    CHECK(continuous_ftsm_control({10, 0}, 10, 0, 0, p, g) ==
          doctest::Approx(p.a2 * 10 / p.b0).epsilon(1e-14));
    // On the surface with an accelerating reference: feedforward a2 x1/b0 + a1 x2/b0 + r''/b0.
    CHECK(continuous_ftsm_control({4, 3}, 4, 3, 50, p, g) ==
          doctest::Approx((p.a2 * 4 + p.a1 * 3 + 50) / p.b0).epsilon(1e-14));

    SUBCASE("discrete law converges to the continuous law as T shrinks") {
        FtsmGains fine = g;
        fine.T = 1e-5;
        fine.Phi = 70;
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> v(-1, 1);
        const double A = 30, w = 2 * M_PI;
        for (int i = 0; i < 500; ++i) {
            const double t = 3 * std::abs(v(rng));
            const double r = A * std::sin(w * t);
            const double rd = A * w * std::cos(w * t);
            const double rdd = -A * w * w * std::sin(w * t);
            double e1 = 1 + 19 * std::abs(v(rng));
            if (v(rng) < 0) e1 = -e1;
            const PlantState s{r + e1, rd + 200 * v(rng)};
            const ReferenceWindow win{r, A * std::sin(w * (t + fine.T)),
                                      A * std::sin(w * (t + 2 * fine.T))};
            const double ud = ftsm_control(s, win, p, fine);
            const double uc = continuous_ftsm_control(s, r, rd, rdd, p, fine);
            CHECK(std::abs(ud - uc) <= 1e-3 * std::abs(uc));
        }
    }
}

TEST_CASE("gain validation") {
    FtsmGains g;
    CHECK_NOTHROW(validate(g));
    g.q1 = 8;
    CHECK_THROWS_AS(validate(g), std::invalid_argument);
    g = {};
    g.q1 = 9;
    g.p1 = 7;
    CHECK_THROWS_AS(validate(g), std::invalid_argument);
    g = {};
    g.Phi = 100;  // = 1/T
    CHECK_THROWS_AS(validate(g), std::invalid_argument);
    g = {};
    g.K = 0;
    CHECK_THROWS_AS(validate(g), std::invalid_argument);
    g = {};
    g.alpha = 0;
    CHECK_THROWS_AS(validate(g), std::invalid_argument);
    CHECK_NOTHROW(validate_tsm(tsm_gains(FtsmGains{})));
}

TEST_CASE("sarpturk_check") {
    SUBCASE("geometric decay passes every check") {
        std::vector<double> s;
        for (int n = 0; n < 40; ++n) s.push_back(std::pow(0.3, n));
        const auto rep = sarpturk_check(s, 0.2);
        CHECK(rep.violations_total == 0);
        REQUIRE(rep.band_entry);
        CHECK(*rep.band_entry == 2);  // 0.09 is the first power <= 0.2
        CHECK(rep.post_entry_max == doctest::Approx(0.09));
    }
    SUBCASE("constant series violates at every step") {
        const std::vector<double> s(10, 2.5);
        const auto rep = sarpturk_check(s, 0.2);
        CHECK(rep.violations_total == 9);
        CHECK(rep.violations_before_entry == 9);
        CHECK_FALSE(rep.band_entry);
    }
    SUBCASE("violations after band entry are not counted as pre-entry") {
        const std::vector<double> s{5, 1, 0.1, -0.1, 0.1};
        const auto rep = sarpturk_check(s, 0.2);
        CHECK(*rep.band_entry == 2);
        CHECK(rep.violations_before_entry == 0);
        CHECK(rep.violations_total == 2);
    }
    SUBCASE("short series") {
        CHECK_THROWS_AS(sarpturk_check(std::vector<double>{1.0}, 0.2), std::invalid_argument);
    }
    CHECK(default_band_radius(FtsmGains{}) == doctest::Approx(0.2));
}

TEST_CASE("nominal FTSM closed loop satisfies the reaching condition before the band") {
    const FtsmGains g;
    for (const auto& p : {model::kElevationPlant, model::kAzimuthPlant}) {
        PlantState s{0, 0};
        std::vector<double> sigma;
        for (int n = 0; n < 200; ++n) {
            sigma.push_back(compute_surfaces(s, {10, 10, 10}, g).sigma2);
            s = model::euler_step(p, s, ftsm_control(s, {10, 10, 10}, p, g), 0, g.T);
        }
        const auto rep = sarpturk_check(sigma, default_band_radius(g));
        REQUIRE(rep.band_entry);
        CHECK(rep.violations_before_entry == 0);
        CHECK(*rep.band_entry > 0);
    }
}

TEST_CASE("recursion decreases |sigma| outside K T / (2 - Phi T)") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0, 1);
    for (int i = 0; i < 5000; ++i) {
        const double T = 0.001 + 0.02 * unit(rng);
        const double Phi = (0.01 + 0.98 * unit(rng)) / T;
        const double K = 0.1 + 50 * unit(rng);
        const double edge = K * T / (2 - Phi * T);
        double sigma = edge * (1 + 1e-6 + 100 * unit(rng));
        if (unit(rng) < 0.5) sigma = -sigma;
        CHECK(std::abs(oracle::surface_recursion(sigma, Phi, K, T)) < std::abs(sigma));
    }
}

TEST_CASE("bounded disturbance keeps sigma2 inside the perturbed-recursion bound") {
    const FtsmGains g;
    const double mu = 0.1;
    const double bound = (g.K * g.T + mu * g.T) / (g.Phi * g.T) + g.K * g.T;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(-mu, mu);
        const PlantParams p = seed % 2 ? model::kElevationPlant : model::kAzimuthPlant;
        PlantState s{0, 0};
        std::vector<double> sigma;
        for (int n = 0; n < 400; ++n) {
            const ReferenceWindow w{10, 10, 10};
            sigma.push_back(compute_surfaces(s, w, g).sigma2);
            s = model::euler_step(p, s, ftsm_control(s, w, p, g), dist(rng), g.T);
        }
        const auto rep = sarpturk_check(sigma, default_band_radius(g));
        REQUIRE(rep.band_entry);
        CHECK(rep.post_entry_max <= bound);
    }
}
