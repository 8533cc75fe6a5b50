#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "parosc/states.hpp"

using namespace parosc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

ClassicalContext squeezed_driven_context() {
    FrequencyProfile profile = CosineDrive{1.0, 1.0, 3.0, 1.0, 0.4};
    ErmakovParams params = ErmakovParams::make(profile, std::sqrt(2.0), std::sqrt(2.0));
    return ClassicalContext(profile, params);
}

double max_pointwise_gap(const WaveField& a, const WaveField& b, bool quotient_phase) {
    REQUIRE(a.grid.matches(b.grid));
    std::complex<double> phase{1.0, 0.0};
    if (quotient_phase) {
        std::complex<double> ip = inner_product(a, b);
        REQUIRE(std::abs(ip) > 0.0);
        phase = ip / std::abs(ip);
    }
    double gap = 0.0;
    for (int i = 0; i < a.grid.n; ++i)
        gap = std::max(gap, std::abs(a.values[i] * phase - b.values[i]));
    return gap;
}

}  // namespace

TEST_CASE("invariant spectra mark the added levels as missing states") {
    SeedSpec m4 = SeedSpec::one_step(4);
    SeedSpec pair45 = SeedSpec::two_step(4, 5);

    SpectrumTable base = spectrum(0, m4, 4);
    for (int n = 0; n <= 4; ++n) {
        CHECK(base.levels[n].lambda == 2.0 * n + 1.0);
        CHECK_FALSE(base.levels[n].missing);
    }

    SpectrumTable one = spectrum(1, m4, 4);
    CHECK(one.levels[0].lambda == -9.0);
    CHECK(one.levels[0].missing);
    CHECK(one.levels[1].lambda == 1.0);
    CHECK(one.levels[4].lambda == 7.0);
    CHECK_FALSE(one.levels[1].missing);

    SpectrumTable two = spectrum(2, pair45, 5);
    CHECK(two.levels[0].lambda == -11.0);
    CHECK(two.levels[1].lambda == -9.0);
    CHECK(two.levels[0].missing);
    CHECK(two.levels[1].missing);
    CHECK(two.levels[2].lambda == 1.0);
    CHECK(two.levels[5].lambda == 7.0);

    SpectrumTable gauss = spectrum(1, SeedSpec::gaussian_ground(), 3);
    CHECK(gauss.levels[0].lambda == 3.0);
    CHECK(gauss.levels[3].lambda == 9.0);
    for (auto& lv : gauss.levels) CHECK_FALSE(lv.missing);

    // m = 0 keeps its missing level at -1; it is not the Gaussian chain.
    SpectrumTable m0 = spectrum(1, SeedSpec::one_step(0), 2);
    CHECK(m0.levels[0].lambda == -1.0);
    CHECK(m0.levels[0].missing);
    CHECK(m0.levels[1].lambda == 1.0);

    CHECK_THROWS_AS(state_lambda(3, 0, m4), DomainError);
    CHECK_THROWS_AS(state_lambda(1, -1, m4), DomainError);
    CHECK_THROWS_AS(state_lambda(2, 0, m4), DomainError);
    CHECK_THROWS_AS(eigen_state(2, 0, SeedSpec::two_step(3, 4)), NodelessnessError);
}

TEST_CASE("second-step numerators match the double-seed closed form") {
    // Q_j = 2 [ (m2-m1) Hm1 Hm2 H_{j+1}
    //           + 2 (m1 (j+m2+1) Hm1' ... ) H_j ]  with the index-lowered
    // pseudo-Hermite products; zero-index terms drop out.
    auto closed = [](int m1, int m2, int j) {
        IntPolynomial acc =
            mpz_class(m2 - m1) * (pseudo_hermite_poly(m1) * pseudo_hermite_poly(m2) *
                                  hermite_poly(j + 1));
        IntPolynomial cross;
        if (m1 > 0)
            cross = cross + mpz_class(m1 * (j + m2 + 1)) *
                                (pseudo_hermite_poly(m1 - 1) * pseudo_hermite_poly(m2));
        if (m2 > 0)
            cross = cross - mpz_class(m2 * (j + m1 + 1)) *
                                (pseudo_hermite_poly(m1) * pseudo_hermite_poly(m2 - 1));
        acc = acc + mpz_class(2) * (cross * hermite_poly(j));
        return mpz_class(2) * acc;
    };

    for (auto [m1, m2] : {std::pair{0, 1}, {0, 3}, {2, 3}, {2, 5}, {4, 5}}) {
        SeedSpec spec = SeedSpec::two_step(m1, m2);
        for (int j = 0; j <= 4; ++j) {
            EigenState st = eigen_state(2, j + 2, spec);
            CHECK(st.num == closed(m1, m2, j));
        }
    }
}

TEST_CASE("chain states are exact eigenfunctions of the deformed invariants") {
    // Reduced gauge: I_k acts as R -> -R'' + 2z R' + R + D_k(z) R on the
    // rational profile, so the eigenvalue equations close in exact rational
    // arithmetic.
    SeedSpec m4 = SeedSpec::one_step(4);
    for (int n = 0; n <= 4; ++n) {
        EigenState st = eigen_state(0, n, m4);
        RationalTerm r = RationalTerm::from_polynomial(st.num);
        CHECK(equivalent(reduced_apply(ReducedOp::Invariant0, m4, r),
                         mpq_class(2 * n + 1) * r));
    }

    for (int n = 0; n <= 4; ++n) {
        EigenState st = eigen_state(1, n, m4);
        RationalTerm r = RationalTerm::make(st.num, st.den);
        long lambda = (n == 0) ? -9 : 2 * (n - 1) + 1;
        CHECK(equivalent(reduced_apply(ReducedOp::Invariant1, m4, r), mpq_class(lambda) * r));
    }

    SeedSpec m0 = SeedSpec::one_step(0);
    for (int n = 0; n <= 2; ++n) {
        EigenState st = eigen_state(1, n, m0);
        RationalTerm r = RationalTerm::make(st.num, st.den);
        long lambda = (n == 0) ? -1 : 2 * (n - 1) + 1;
        CHECK(equivalent(reduced_apply(ReducedOp::Invariant1, m0, r), mpq_class(lambda) * r));
    }

    SeedSpec gauss = SeedSpec::gaussian_ground();
    for (int n = 0; n <= 3; ++n) {
        EigenState st = eigen_state(1, n, gauss);
        RationalTerm r = RationalTerm::from_polynomial(st.num);
        CHECK(equivalent(reduced_apply(ReducedOp::Invariant1, gauss, r),
                         mpq_class(2 * n + 3) * r));
    }

    for (auto [m1, m2] : {std::pair{4, 5}, {2, 3}, {0, 3}}) {
        SeedSpec spec = SeedSpec::two_step(m1, m2);
        for (int n = 0; n <= 5; ++n) {
            EigenState st = eigen_state(2, n, spec);
            RationalTerm r = RationalTerm::make(st.num, st.den);
            long lambda;
            if (n == 0)
                lambda = -2 * m2 - 1;
            else if (n == 1)
                lambda = -2 * m1 - 1;
            else
                lambda = 2 * (n - 2) + 1;
            CHECK(equivalent(reduced_apply(ReducedOp::Invariant2, spec, r),
                             mpq_class(lambda) * r));
        }
    }
}

TEST_CASE("intertwiner adjoints annihilate the missing states exactly") {
    SeedSpec m4 = SeedSpec::one_step(4);
    RationalTerm missing1 = RationalTerm::make(IntPolynomial::constant(1), pseudo_hermite_poly(4));
    CHECK(reduced_apply(ReducedOp::StepOneAdj, m4, missing1).is_zero());

    SeedSpec pair45 = SeedSpec::two_step(4, 5);
    RationalTerm missing2 =
        RationalTerm::make(pseudo_hermite_poly(4), wronskian_seed(4, 5));
    CHECK(reduced_apply(ReducedOp::StepTwoAdj, pair45, missing2).is_zero());
}

TEST_CASE("ladder action carries the sqrt(2n+2) factors") {
    SeedSpec m4 = SeedSpec::one_step(4);
    for (int n = 1; n <= 6; ++n) {
        RationalTerm r = RationalTerm::from_polynomial(hermite_poly(n));
        // A H_n = H_n' = 2n H_{n-1}; with unit-norm constants C_n the matrix
        // element is C_{n-1} 2n / C_n = sqrt(2n).
        CHECK(equivalent(reduced_apply(ReducedOp::Lower, m4, r),
                         RationalTerm::from_polynomial(hermite_poly(n - 1), mpq_class(2 * n))));
        double cn = eigen_state(0, n, m4).norm_constant;
        double cn1 = eigen_state(0, n - 1, m4).norm_constant;
        CHECK_THAT(cn * 2.0 * n / cn1, WithinRel(std::sqrt(2.0 * n), 1e-13));
    }
}

TEST_CASE("printed normalization constants match their closed forms") {
    SeedSpec m4 = SeedSpec::one_step(4);
    EigenState missing = eigen_state(1, 0, m4);
    CHECK_THAT(missing.norm_constant, WithinRel(std::sqrt(384.0 / kSqrtPi), 1e-14));
    CHECK_THAT(missing.norm_constant, WithinAbs(14.719, 1e-3));

    EigenState mapped = eigen_state(1, 3, m4);  // j = 2
    CHECK_THAT(mapped.norm_constant,
               WithinRel(1.0 / std::sqrt(8.0 * 2.0 * 7.0 * kSqrtPi), 1e-14));

    SeedSpec pair45 = SeedSpec::two_step(4, 5);
    CHECK_THAT(eigen_state(2, 0, pair45).norm_constant,
               WithinRel(std::sqrt(64.0 * 120.0 * 1.0 / kSqrtPi), 1e-14));
    CHECK_THAT(eigen_state(2, 1, pair45).norm_constant,
               WithinRel(std::sqrt(32.0 * 24.0 * 1.0 / kSqrtPi), 1e-14));
    CHECK_THAT(eigen_state(2, 4, pair45).norm_constant,  // j = 2
               WithinRel(1.0 / std::sqrt(kSqrtPi * 16.0 * 2.0 * 7.0 * 8.0), 1e-14));
}

TEST_CASE("states are unit normalized on the default grid at several times") {
    ClassicalContext ctx = squeezed_driven_context();
    SeedSpec m4 = SeedSpec::one_step(4);
    SeedSpec pair45 = SeedSpec::two_step(4, 5);

    for (double t : {0.0, 0.55, 1.3}) {
        ClassicalState cs = ctx.state(t);
        Grid grid = default_grid(cs, 7);
        for (int n = 0; n <= 5; ++n) {
            CHECK_THAT(field_norm(eigenfunction(0, n, m4, cs, grid)), WithinRel(1.0, 1e-8));
            CHECK_THAT(field_norm(eigenfunction(1, n, m4, cs, grid)), WithinRel(1.0, 1e-8));
            CHECK_THAT(field_norm(eigenfunction(2, n, pair45, cs, grid)), WithinRel(1.0, 1e-8));
        }
        CHECK_THAT(field_norm(eigenfunction(1, 3, SeedSpec::gaussian_ground(), cs, grid)),
                   WithinRel(1.0, 1e-8));
        CHECK_THAT(field_norm(eigenfunction(1, 2, SeedSpec::one_step(0), cs, grid)),
                   WithinRel(1.0, 1e-8));
    }
}

TEST_CASE("chain families are orthonormal to quadrature accuracy") {
    ClassicalContext ctx = squeezed_driven_context();
    SeedSpec pair45 = SeedSpec::two_step(4, 5);
    SeedSpec m4 = SeedSpec::one_step(4);

    for (double t : {0.0, 0.55, 1.3}) {
        ClassicalState cs = ctx.state(t);
        Grid grid = default_grid(cs, 7);
        for (int k : {1, 2}) {
            const SeedSpec& spec = (k == 1) ? m4 : pair45;
            std::vector<WaveField> fields;
            for (int n = 0; n <= 5; ++n) fields.push_back(eigenfunction(k, n, spec, cs, grid));
            for (int i = 0; i <= 5; ++i)
                for (int j = 0; j <= 5; ++j) {
                    double expected = (i == j) ? 1.0 : 0.0;
                    CHECK_THAT(std::abs(inner_product(fields[i], fields[j])),
                               WithinAbs(expected, 1e-8));
                }
        }
    }
}

TEST_CASE("operator route reproduces the printed closed forms") {
    ClassicalContext ctx = squeezed_driven_context();
    ClassicalState cs = ctx.state(0.55);
    Grid grid = default_grid(cs, 8);

    SeedSpec m4 = SeedSpec::one_step(4);
    for (int n = 1; n <= 4; ++n) {
        EigenState closed = eigen_state(1, n, m4);
        RoutedState routed = eigen_state_operator_route(1, n, m4);
        CHECK(equivalent(routed.content, RationalTerm::make(closed.num, closed.den)));
        CHECK_THAT(routed.constant, WithinRel(closed.norm_constant, 1e-12));
        WaveField a = eigenfunction(1, n, m4, cs, grid);
        WaveField b = routed_field(routed, cs, grid);
        CHECK(max_pointwise_gap(b, a, true) < 1e-8);
        CHECK(max_pointwise_gap(b, a, false) < 1e-8);  // no hidden sign flip
    }

    SeedSpec pair45 = SeedSpec::two_step(4, 5);
    for (int n = 2; n <= 5; ++n) {
        EigenState closed = eigen_state(2, n, pair45);
        RoutedState routed = eigen_state_operator_route(2, n, pair45);
        CHECK(equivalent(routed.content, RationalTerm::make(closed.num, closed.den)));
        WaveField a = eigenfunction(2, n, pair45, cs, grid);
        WaveField b = routed_field(routed, cs, grid);
        CHECK(max_pointwise_gap(b, a, true) < 1e-8);
        CHECK(max_pointwise_gap(b, a, false) < 1e-8);
    }

    // n = 1 rides B_2 off the first-step missing state.  The pseudo-Hermite
    // equation gives 2z g + g' = 2 (m2-m1) Hm1 Hm2, so the route lands on
    // -2(m2-m1) Hm2 / g: the printed positive constant fixes the opposite
    // sign, which the phase quotient absorbs.
    {
        EigenState closed = eigen_state(2, 1, pair45);
        RoutedState routed = eigen_state_operator_route(2, 1, pair45);
        CHECK(equivalent(routed.content,
                         mpq_class(-2) * RationalTerm::make(closed.num, closed.den)));
        CHECK_THAT(routed.constant * 2.0, WithinRel(closed.norm_constant, 1e-12));
        WaveField a = eigenfunction(2, 1, pair45, cs, grid);
        WaveField b = routed_field(routed, cs, grid);
        CHECK(max_pointwise_gap(b, a, true) < 1e-8);
        CHECK(max_pointwise_gap(b, a, false) > 1.0);  // genuine sign flip
    }

    // Gaussian chain: B_1 = A lowers, phi_n^(1) = phi_n^(0) with lambda 2n+3.
    SeedSpec gauss = SeedSpec::gaussian_ground();
    for (int n = 0; n <= 3; ++n) {
        RoutedState routed = eigen_state_operator_route(1, n, gauss);
        CHECK(routed.lambda == 2.0 * n + 3.0);
        WaveField a = eigenfunction(0, n, gauss, cs, grid);
        WaveField b = routed_field(routed, cs, grid);
        CHECK(max_pointwise_gap(b, a, false) < 1e-12);
    }

    CHECK_THROWS_AS(eigen_state_operator_route(1, 0, m4), DomainError);
    CHECK_THROWS_AS(eigen_state_operator_route(2, 0, pair45), DomainError);
}

TEST_CASE("degenerate two-step pair collapses to the shifted base chain") {
    // (m1,m2) = (0,1): the deformation is the constant -4, so the chain
    // states must coincide with the Hermite states while the eigenvalues
    // shift down by four.
    ClassicalContext ctx = squeezed_driven_context();
    ClassicalState cs = ctx.state(1.3);
    Grid grid = default_grid(cs, 6);
    SeedSpec pair01 = SeedSpec::two_step(0, 1);
    Deformation d = deformation_v2(pair01);
    CHECK(d.constant == -4);
    CHECK(d.rational.is_zero());
    for (int n = 0; n <= 4; ++n) {
        WaveField two = eigenfunction(2, n, pair01, cs, grid);
        WaveField base = eigenfunction(0, n, pair01, cs, grid);
        CHECK(max_pointwise_gap(two, base, false) < 1e-12);
        CHECK(state_lambda(2, n, pair01) == 2.0 * n + 1.0 - 4.0);
    }
}

TEST_CASE("missing states take positive values at the rightmost peak") {
    FrequencyProfile profile = CosineDrive{1.0, 0.0, 0.0, 0.0, 0.0};
    ErmakovParams params = ErmakovParams::make(profile, 1.0, 1.0);
    ClassicalState cs = classical_state(profile, params, 0.0);
    Grid grid = default_grid(cs, 6);

    for (auto field : {eigenfunction(1, 0, SeedSpec::one_step(4), cs, grid),
                       eigenfunction(2, 0, SeedSpec::two_step(4, 5), cs, grid)}) {
        int peak = -1;
        for (int i = grid.n - 2; i >= 1; --i) {
            double mag = std::abs(field.values[i]);
            if (mag > 1e-8 && mag >= std::abs(field.values[i - 1]) &&
                mag >= std::abs(field.values[i + 1])) {
                peak = i;
                break;
            }
        }
        REQUIRE(peak > 0);
        CHECK(field.values[peak].real() > 0.0);
        CHECK_THAT(field.values[peak].imag(), WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("phase assembly combines tau, the gamma term and the drive work") {
    // Static limit: chi_n = -(2n+1) t.
    FrequencyProfile still = CosineDrive{1.0, 0.0, 0.0, 0.0, 0.0};
    ErmakovParams unit = ErmakovParams::make(still, 1.0, 1.0);
    ClassicalContext still_ctx(still, unit);
    SeedSpec m4 = SeedSpec::one_step(4);
    for (int n : {0, 2}) {
        PhaseRecord rec = chi_phase(0, n, m4, still_ctx, 0.8);
        CHECK_THAT(rec.chi, WithinRel(-(2.0 * n + 1.0) * 0.8, 1e-12));
    }

    // Squeezed vacuum: chi = -lambda tau with the frozen tau anchor.
    FrequencyProfile squeezed = CosineDrive{1.0, 0.0, 0.0, 0.0, 0.0};
    ErmakovParams sq = ErmakovParams::make(squeezed, std::sqrt(2.0), std::sqrt(2.0));
    ClassicalContext sq_ctx(squeezed, sq);
    PhaseRecord sq2 = chi_phase(0, 2, m4, sq_ctx, 0.7);
    CHECK_THAT(sq2.chi, WithinRel(-5.0 * 0.3385605503419395582, 1e-10));

    // Added level: the missing state rotates with positive rate |eps1| tau.
    PhaseRecord added = chi_phase(1, 0, m4, sq_ctx, 0.7);
    CHECK_THAT(added.chi, WithinRel(9.0 * 0.3385605503419395582, 1e-10));

    // Driven case at a = c = 1: gamma = cos 2t - 0.4 cos 3t, tau = t, and the
    // work integral matches the frozen quadrature anchor.
    FrequencyProfile driven = CosineDrive{1.0, 1.0, 3.0, 1.0, 0.0};
    ErmakovParams dp = ErmakovParams::make(driven, 1.0, 1.0);
    ClassicalContext driven_ctx(driven, dp);
    double t = 0.7;
    double gamma = std::cos(2.0 * t) - 0.4 * std::cos(3.0 * t);
    double gamma_dot = -2.0 * std::sin(2.0 * t) + 1.2 * std::sin(3.0 * t);
    double expected = -3.0 * t - 0.25 * gamma * gamma_dot + 0.5 * 0.176083046597003144;
    PhaseRecord rec = chi_phase(0, 1, m4, driven_ctx, t);
    CHECK_THAT(rec.chi, WithinRel(expected, 1e-9));
    CHECK_THAT(rec.tau, WithinRel(t, 1e-12));
}

TEST_CASE("schrodinger solutions differ from the states by the chi phase only") {
    ClassicalContext ctx = squeezed_driven_context();
    SeedSpec m4 = SeedSpec::one_step(4);
    double t = 0.55;
    ClassicalState cs = ctx.state(t);
    Grid grid = default_grid(cs, 5);

    for (int n : {0, 1, 3}) {
        WaveField psi = schrodinger_solution(1, n, m4, ctx, grid, t);
        WaveField phi = eigenfunction(1, n, m4, cs, grid);
        PhaseRecord rec = chi_phase(1, n, m4, ctx, t);
        std::complex<double> phase = std::exp(std::complex<double>(0.0, rec.chi));
        double gap = 0.0;
        for (int i = 0; i < grid.n; ++i) {
            gap = std::max(gap, std::abs(psi.values[i] - phase * phi.values[i]));
            gap = std::max(gap, std::abs(std::abs(psi.values[i]) - std::abs(phi.values[i])));
        }
        CHECK(gap < 1e-13);
        CHECK(psi.metadata.count("chi") == 1);
    }
}

TEST_CASE("quadrature expectations ride the classical trajectory") {
    FrequencyProfile coherent = CosineDrive{1.0, 0.0, 0.0, 0.7, 0.3};
    ErmakovParams params = ErmakovParams::make(coherent, 1.0, 1.0);
    ClassicalContext ctx(coherent, params);
    SeedSpec m4 = SeedSpec::one_step(4);

    for (double t : {0.0, 0.9, 2.1}) {
        ClassicalState cs = ctx.state(t);
        auto closed = classical_expectations(cs);
        CHECK_THAT(closed.first, WithinAbs(-0.7 * std::cos(2.0 * t + 0.3), 1e-13));
        CHECK_THAT(closed.second, WithinAbs(0.7 * std::sin(2.0 * t + 0.3), 1e-13));

        Grid grid = default_grid(cs, 6);
        for (int n : {0, 3}) {
            auto numeric = quadrature_expectations(eigenfunction(0, n, m4, cs, grid));
            CHECK_THAT(numeric.first, WithinAbs(closed.first, 1e-8));
            CHECK_THAT(numeric.second, WithinAbs(closed.second, 1e-8));
        }
        auto missing = quadrature_expectations(eigenfunction(1, 0, m4, cs, grid));
        CHECK_THAT(missing.first, WithinAbs(closed.first, 1e-8));
        CHECK_THAT(missing.second, WithinAbs(closed.second, 1e-8));
    }
}

TEST_CASE("static parameters freeze the deformed family in time") {
    FrequencyProfile still = CosineDrive{1.0, 0.0, 0.0, 0.0, 0.0};
    ErmakovParams unit = ErmakovParams::make(still, 1.0, 1.0);
    ClassicalContext ctx(still, unit);
    SeedSpec m4 = SeedSpec::one_step(4);

    ClassicalState cs0 = ctx.state(0.3);
    Grid grid = default_grid(cs0, 5);
    WaveField ref = eigenfunction(1, 1, m4, cs0, grid);
    for (double t : {1.1, 2.4}) {
        WaveField other = eigenfunction(1, 1, m4, ctx.state(t), grid);
        CHECK(max_pointwise_gap(other, ref, false) < 1e-10);
    }

    // The deformed potential is static as well.
    SeedSpec pair45 = SeedSpec::two_step(4, 5);
    for (double x : {-1.3, 0.2, 2.8}) {
        double v0 = potential_v2(pair45, ctx.state(0.3), still, x);
        double v1 = potential_v2(pair45, ctx.state(2.4), still, x);
        CHECK_THAT(v0 - v1, WithinAbs(0.0, 1e-10));
    }
}

TEST_CASE("grid gates reject undersized windows") {
    ClassicalContext ctx = squeezed_driven_context();
    ClassicalState cs = ctx.state(0.55);
    SeedSpec m4 = SeedSpec::one_step(4);

    Grid tiny = Grid::centered(-cs.gamma, 2.0 * cs.sigma, 512);
    CHECK_THROWS_AS(eigenfunction(0, 4, m4, cs, tiny), GridError);
    CHECK_THROWS_AS(Grid::centered(0.0, 3.0, 4), GridError);
    CHECK_THROWS_AS(Grid::centered(0.0, -1.0, 64), GridError);

    WaveField ok = eigenfunction(0, 4, m4, cs, default_grid(cs, 4));
    CHECK(tail_mass(ok) <= 1e-12);
}
