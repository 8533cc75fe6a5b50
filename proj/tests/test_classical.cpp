#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "parosc/classical.hpp"
#include "test_util.hpp"

using namespace parosc;
using parosc_test::second_derivative;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const SechPulse kPulse{2.0, 15.0, 1.0, 6.0, 0.0, 0.0};

}  // namespace

TEST_CASE("constant-frequency basis is the trigonometric pair") {
    FrequencyProfile profile = CosineDrive{1.0, 0.0, 0.0, 0.0, 0.0};
    LinearBasis lb = linear_basis(profile, 0.0);
    CHECK(lb.q1 == std::complex<double>(1.0, 0.0));
    CHECK(lb.q1_dot == std::complex<double>(0.0, 0.0));
    CHECK(lb.q2 == std::complex<double>(0.0, 0.0));
    CHECK(lb.q2_dot == std::complex<double>(2.0, 0.0));
    CHECK(lb.w0 == std::complex<double>(2.0, 0.0));
}

TEST_CASE("ermakov parameter construction enforces the constraint") {
    FrequencyProfile cosine = CosineDrive{1.0};
    ErmakovParams p = ErmakovParams::make(cosine, std::sqrt(2.0), std::sqrt(2.0));
    CHECK_THAT(p.b, WithinRel(2.0, 1e-14));
    CHECK_THAT(p.b * p.b - 4.0 * p.a * p.c, WithinAbs(-16.0 / 4.0, 1e-12));

    ErmakovParams neg = ErmakovParams::make(cosine, std::sqrt(2.0), std::sqrt(2.0), true);
    CHECK_THAT(neg.b, WithinRel(-2.0, 1e-14));

    CHECK_THROWS_AS(ErmakovParams::make(cosine, 0.9, 0.9), DomainError);
    CHECK_THROWS_AS(ErmakovParams::make(cosine, -1.0, 2.0), DomainError);

    FrequencyProfile pulse = kPulse;
    ErmakovParams ps = ErmakovParams::make(pulse, 1.0, 1.0);
    CHECK_THAT(ps.b, WithinRel(2.0 * std::sqrt(1.5), 1e-14));
    CHECK(ps.w0 == std::complex<double>(0.0, -2.0 * std::sqrt(2.0)));
    CHECK_THROWS_AS(ErmakovParams::make(pulse, 1.0, 2.0), DomainError);
}

TEST_CASE("static oscillator state is the identity configuration") {
    FrequencyProfile profile = CosineDrive{1.0};
    ErmakovParams params = ErmakovParams::make(profile, 1.0, 1.0);
    ClassicalContext ctx(profile, params);
    for (double t : {0.0, 0.37, 1.9, 5.2}) {
        ClassicalState s = ctx.state(t);
        CHECK_THAT(s.sigma, WithinAbs(1.0, 1e-13));
        CHECK_THAT(s.sigma_dot, WithinAbs(0.0, 1e-13));
        CHECK_THAT(s.gamma, WithinAbs(0.0, 1e-13));
        CHECK_THAT(s.W, WithinAbs(0.0, 1e-13));
        CHECK_THAT(s.tau, WithinAbs(t, 1e-12));
    }
}

TEST_CASE("squeezed superposition matches the closed form") {
    FrequencyProfile profile = CosineDrive{1.0};
    double r = std::sqrt(2.0);
    ErmakovParams params = ErmakovParams::make(profile, r, r);
    ClassicalContext ctx(profile, params);
    ClassicalState s0 = ctx.state(0.0);
    CHECK_THAT(s0.sigma * s0.sigma, WithinRel(r, 1e-14));
    for (double t : {0.3, 1.1, 2.9}) {
        ClassicalState s = ctx.state(t);
        CHECK_THAT(s.sigma * s.sigma, WithinRel(r + std::sin(4.0 * t), 1e-13));
    }
}

TEST_CASE("driven trajectory has the stated particular solution") {
    FrequencyProfile profile = CosineDrive{1.0, 1.0, 3.0, 0.0, 0.0};
    ErmakovParams params = ErmakovParams::make(profile, 1.0, 1.0);
    ClassicalContext ctx(profile, params);
    CHECK_THAT(ctx.state(0.0).gamma, WithinRel(-2.0 / 5.0, 1e-14));
    CHECK_FALSE(ctx.resonant_nonperiodic());

    auto gamma = [&](double t) { return ctx.state(t).gamma; };
    for (double t : {0.4, 1.7}) {
        double residual = second_derivative(gamma, t) + 4.0 * gamma(t) - 2.0 * std::cos(3.0 * t);
        CHECK_THAT(residual, WithinAbs(0.0, 1e-8));
    }
}

TEST_CASE("resonant drive grows linearly and is tagged") {
    FrequencyProfile profile = CosineDrive{1.0, 0.8, 2.0, 0.6, 0.9};
    ErmakovParams params = ErmakovParams::make(profile, 1.0, 1.0);
    ClassicalContext ctx(profile, params);
    CHECK(ctx.resonant_nonperiodic());

    auto gamma = [&](double t) { return ctx.state(t).gamma; };
    for (double t : {0.9, 2.2}) {
        double residual = second_derivative(gamma, t) + 4.0 * gamma(t) - 1.6 * std::cos(2.0 * t);
        CHECK_THAT(residual, WithinAbs(0.0, 1e-8));
    }

    // integral of F gamma against the closed form for F = F0 cos(2t),
    // gamma = A cos(2t + phi) + (F0/2) t sin(2t).
    double F0 = 0.8, A = 0.6, phi = 0.9, t = 1.1;
    double expected = 0.5 * F0 * A * (0.25 * (std::sin(4.0 * t + phi) - std::sin(phi)) +
                                      t * std::cos(phi)) +
                      0.25 * F0 * F0 * (std::sin(4.0 * t) / 16.0 - t * std::cos(4.0 * t) / 4.0);
    CHECK_THAT(ctx.force_path_integral(t), WithinRel(expected, 1e-10));
}

TEST_CASE("drive work integral matches the frozen quadrature value") {
    FrequencyProfile profile = CosineDrive{1.0, 1.0, 3.0, 1.0, 0.0};
    ErmakovParams params = ErmakovParams::make(profile, 1.0, 1.0);
    ClassicalContext ctx(profile, params);
    CHECK_THAT(ctx.force_path_integral(0.7), WithinRel(0.176083046597003144, 1e-10));
}

TEST_CASE("phase time reduces to t for the static oscillator") {
    FrequencyProfile profile = CosineDrive{1.0};
    ErmakovParams params = ErmakovParams::make(profile, 1.0, 1.0);
    ClassicalContext ctx(profile, params);
    CHECK_THAT(ctx.phase_time(0.3), WithinAbs(0.3, 1e-12));
    CHECK_THAT(phase_time_arctan(ctx, 0.3), WithinAbs(0.3, 1e-10));
    CHECK_THAT(phase_time_arctan(ctx, 2.6), WithinAbs(2.6, 1e-8));
}

TEST_CASE("phase time for the squeezed profile matches quadrature and arctan") {
    FrequencyProfile profile = CosineDrive{1.0};
    double r = std::sqrt(2.0);
    ErmakovParams params = ErmakovParams::make(profile, r, r);
    ClassicalContext ctx(profile, params);
    CHECK_THAT(ctx.phase_time(0.7), WithinRel(0.3385605503419395582, 1e-12));
    CHECK_THAT(ctx.phase_time(0.5 * M_PI), WithinRel(0.5 * M_PI, 1e-10));
    for (double t : {0.5 * M_PI, 2.3}) {
        CHECK_THAT(phase_time_arctan(ctx, t), WithinAbs(ctx.phase_time(t), 1e-8));
    }
    // monotone accumulation
    double prev = 0.0;
    for (int i = 1; i <= 40; ++i) {
        double cur = ctx.phase_time(0.1 * i);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("sech pulse basis matches the frozen hypergeometric anchors") {
    FrequencyProfile profile = kPulse;
    ErmakovParams params = ErmakovParams::make(profile, 1.0, 1.0);
    ClassicalContext ctx(profile, params);

    CHECK_THAT(sech_nu(kPulse), WithinRel(3.905124837953327, 1e-14));

    LinearBasis lb = ctx.basis(6.0);
    CHECK_THAT(lb.q1.real(), WithinRel(-0.57894723790785265879, 1e-12));
    CHECK_THAT(lb.q1.imag(), WithinRel(0.034730910144824429971, 1e-11));
    CHECK_THAT(lb.q1_dot.real(), WithinRel(-0.091273790154020536037, 1e-11));
    CHECK_THAT(lb.q1_dot.imag(), WithinRel(-2.4372575740542094202, 1e-12));

    CHECK_THAT(ctx.sigma_squared(0.0), WithinRel(2.108841858326843639, 1e-10));
    CHECK_THAT(ctx.sigma_squared(6.0), WithinRel(1.4919217368490275317, 1e-11));
    CHECK_THAT(ctx.sigma_squared(7.3), WithinRel(0.41707180716318665327, 1e-10));

    CHECK_THAT(ctx.phase_time(0.7), WithinRel(0.98005788849687989045, 1e-9));
    CHECK_THAT(ctx.phase_time(6.0), WithinRel(6.1010409753226007252, 1e-10));
    CHECK_THAT(ctx.phase_time(7.5), WithinRel(8.7419850328959360837, 1e-10));
}

TEST_CASE("sech pulse ODE path agrees with the series closed form away from the center") {
    FrequencyProfile profile = kPulse;
    ErmakovParams params = ErmakovParams::make(profile, 1.0, 1.0);
    ClassicalContext ctx(profile, params);
    for (double dt : {-1.5, -0.5, 0.5, 1.5}) {
        auto [q1, q1_dot] = sech_basis_closed_form(kPulse, 6.0 + dt);
        LinearBasis lb = ctx.basis(6.0 + dt);
        CHECK_THAT(std::abs(lb.q1 - q1), WithinAbs(0.0, 1e-8));
        CHECK_THAT(std::abs(lb.q1_dot - q1_dot), WithinAbs(0.0, 1e-8));
    }
}

TEST_CASE("wronskian stays constant along the pulse") {
    FrequencyProfile profile = kPulse;
    ErmakovParams params = ErmakovParams::make(profile, 1.0, 1.0);
    ClassicalContext ctx(profile, params);
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> dist(-2.0, 14.0);
    for (int i = 0; i < 100; ++i) {
        LinearBasis lb = ctx.basis(dist(rng));
        std::complex<double> w = lb.q1 * lb.q2_dot - lb.q1_dot * lb.q2;
        CHECK_THAT(std::abs(w - lb.w0) / std::abs(lb.w0), WithinAbs(0.0, 1e-10));
    }
}

TEST_CASE("ermakov residual vanishes for both built-in profiles") {
    FrequencyProfile cosine = CosineDrive{1.0};
    double r = std::sqrt(2.0);
    ClassicalContext squeezed(cosine, ErmakovParams::make(cosine, r, r));
    auto sigma_cos = [&](double t) { return squeezed.state(t).sigma; };
    for (double t : {0.5, 1.3, 2.8}) {
        double residual =
            second_derivative(sigma_cos, t) + 4.0 * sigma_cos(t) - 4.0 / std::pow(sigma_cos(t), 3);
        CHECK_THAT(residual, WithinAbs(0.0, 1e-8));
    }

    FrequencyProfile pulse = kPulse;
    ClassicalContext sech(pulse, ErmakovParams::make(pulse, 1.0, 1.0));
    auto sigma_sech = [&](double t) { return sech.state(t).sigma; };
    for (double t : {4.5, 6.0, 7.1}) {
        double w4 = 4.0 * omega2_at(pulse, t);
        double residual = second_derivative(sigma_sech, t) + w4 * sigma_sech(t) -
                          4.0 / std::pow(sigma_sech(t), 3);
        CHECK_THAT(residual, WithinAbs(0.0, 1e-8));
    }
}

TEST_CASE("auxiliary W field matches its definition and sigma stays positive") {
    FrequencyProfile pulse =
        SechPulse{2.0, 15.0, 1.0, 6.0, 0.3, -0.4};
    ClassicalContext ctx(pulse, ErmakovParams::make(pulse, 1.0, 1.0));
    for (double t : {-1.0, 2.0, 5.5, 6.0, 9.4}) {
        ClassicalState s = ctx.state(t);
        CHECK_THAT(s.sigma * s.gamma_dot - s.sigma_dot * s.gamma, WithinAbs(s.W, 1e-12));
        CHECK(s.sigma > 0.0);
    }
}

TEST_CASE("custom profile reproduces the harmonic closed forms") {
    double A = 0.7, phi = 0.4;
    CustomProfile custom;
    custom.omega2 = [](double) { return 1.0; };
    custom.force = [](double t) { return 0.5 * std::cos(3.0 * t); };
    custom.gamma0 = A * std::cos(phi) + 2.0 * 0.5 * std::cos(0.0) / (4.0 - 9.0);
    custom.gamma_dot0 = -2.0 * A * std::sin(phi);
    FrequencyProfile generic = custom;
    FrequencyProfile closed = CosineDrive{1.0, 0.5, 3.0, A, phi};

    double r = std::sqrt(2.0);
    ClassicalContext gctx(generic, ErmakovParams::make(generic, r, r));
    ClassicalContext cctx(closed, ErmakovParams::make(closed, r, r));
    for (double t : {0.0, 0.6, 1.9, 3.3}) {
        ClassicalState g = gctx.state(t);
        ClassicalState c = cctx.state(t);
        CHECK_THAT(g.sigma * g.sigma, WithinAbs(c.sigma * c.sigma, 1e-10));
        CHECK_THAT(g.gamma, WithinAbs(c.gamma, 1e-10));
        CHECK_THAT(g.gamma_dot, WithinAbs(c.gamma_dot, 1e-10));
        CHECK_THAT(g.tau, WithinAbs(c.tau, 1e-10));
    }
    CHECK_THAT(gctx.force_path_integral(0.9), WithinAbs(cctx.force_path_integral(0.9), 1e-10));
}

TEST_CASE("custom profile rejects non-positive frequency samples") {
    CustomProfile custom;
    custom.omega2 = [](double t) { return 1.0 - t; };
    FrequencyProfile profile = custom;
    ClassicalContext ctx(profile, ErmakovParams::make(profile, 1.0, 1.0));
    CHECK_THROWS_AS(ctx.state(2.5), DomainError);
}
