#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "parosc/classical.hpp"
#include "parosc/errors.hpp"
#include "parosc/int_polynomial.hpp"
#include "parosc/profiles.hpp"
#include "parosc/specfun.hpp"

namespace parosc {

// Seed families for the factorization chain. PseudoHermite uses
// u = e^{z^2/2} H_m(z) with eigenvalue epsilon = -2m-1 (below the spectrum);
// GaussianGround uses u = e^{-z^2/2} with epsilon = +1, the shape-invariant
// displacement case.
enum class SeedFamily { PseudoHermite, GaussianGround };

struct SeedSpec {
    int order = 1;
    SeedFamily family = SeedFamily::PseudoHermite;
    int m1 = 0;
    int m2 = 0;

    static SeedSpec one_step(int m) {
        if (m < 0) throw DomainError("one-step seed index must be non-negative");
        if (m % 2 != 0)
            throw NodelessnessError("odd pseudo-hermite index vanishes at z=0; seed has a node");
        return {1, SeedFamily::PseudoHermite, m, 0};
    }

    // Indices are normalized ascending; the Wronskian seed is antisymmetric so
    // the chain itself is order-insensitive.
    static SeedSpec two_step(int m1, int m2) {
        if (m1 < 0 || m2 < 0) throw DomainError("two-step seed indices must be non-negative");
        if (m1 == m2) throw DomainError("two-step seed indices must differ");
        if (m1 > m2) std::swap(m1, m2);
        if ((m1 + m2) % 2 == 0)
            throw NodelessnessError("equal-parity pair: Wronskian seed has real roots");
        return {2, SeedFamily::PseudoHermite, m1, m2};
    }

    static SeedSpec gaussian_ground() { return {1, SeedFamily::GaussianGround, 0, 0}; }

    double epsilon1() const {
        return family == SeedFamily::GaussianGround ? 1.0 : -2.0 * m1 - 1.0;
    }

    double epsilon2() const {
        if (order != 2) throw DomainError("epsilon2 requires a two-step seed");
        return -2.0 * m2 - 1.0;
    }

    // Constant-shift chains: the deformation has no rational part.
    bool shape_invariant() const {
        return family == SeedFamily::GaussianGround || (order == 1 && m1 == 0);
    }
};

// Seed function u(z) = e^{sign z^2/2} * poly(z) solving -u'' + z^2 u = eps u.
struct SeedFunction {
    double epsilon = 0.0;
    int gauss_sign = 1;
    IntPolynomial poly;

    double operator()(double z) const {
        return std::exp(0.5 * gauss_sign * z * z) * poly.eval<double>(z);
    }

    double derivative(double z) const {
        return std::exp(0.5 * gauss_sign * z * z) *
               (gauss_sign * z * poly.eval<double>(z) + poly.derivative().eval<double>(z));
    }
};

inline SeedFunction seed_u(int m) {
    if (m < 0) throw DomainError("seed_u: negative index");
    return {-2.0 * m - 1.0, 1, pseudo_hermite_poly(m)};
}

inline SeedFunction seed_for(const SeedSpec& spec) {
    if (spec.family == SeedFamily::GaussianGround) return {1.0, -1, IntPolynomial{1}};
    return seed_u(spec.m1);
}

// General solution of the stationary equation -u'' + z^2 u = eps u as a
// Kummer pair; polynomial seeds are the special points eps = -2m-1.
struct GeneralSeed {
    double epsilon = 0.0;
    double eta0 = 1.0;
    double eta1 = 0.0;

    double operator()(double z) const {
        double x = z * z;
        double even = kummer_1f1(0.25 * (1.0 - epsilon), 0.5, x).real();
        double odd = z * kummer_1f1(0.25 * (3.0 - epsilon), 1.5, x).real();
        return std::exp(-0.5 * x) * (eta0 * even + eta1 * odd);
    }

    double derivative(double z) const {
        double x = z * z;
        double a0 = 0.25 * (1.0 - epsilon), a1 = 0.25 * (3.0 - epsilon);
        double f0 = kummer_1f1(a0, 0.5, x).real();
        double f1 = kummer_1f1(a1, 1.5, x).real();
        double df0 = 2.0 * z * (a0 / 0.5) * kummer_1f1(a0 + 1.0, 1.5, x).real();
        double df1 = 2.0 * z * (a1 / 1.5) * kummer_1f1(a1 + 1.0, 2.5, x).real();
        double f = eta0 * f0 + eta1 * z * f1;
        double dfdz = eta0 * df0 + eta1 * (f1 + z * df1);
        return std::exp(-0.5 * x) * (dfdz - z * f);
    }
};

inline GeneralSeed seed_general(double epsilon, double eta0, double eta1) {
    if (eta0 == 0.0 && eta1 == 0.0)
        throw DomainError("seed_general: at least one of eta0, eta1 must be nonzero");
    return {epsilon, eta0, eta1};
}

struct NodelessReport {
    bool nodeless = true;
    std::vector<double> real_roots;
};

// Real-root detection: companion-matrix eigenvalues, complex Newton polish,
// then an exact-arithmetic sign-change certificate around each candidate.
inline NodelessReport nodeless_check(const IntPolynomial& p) {
    if (p.is_zero()) throw DomainError("nodeless_check: zero polynomial");
    NodelessReport report;
    int n = p.degree();
    if (n <= 0) return report;

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    double lead = p.leading().get_d();
    for (int j = 0; j < n - 1; ++j) companion(j + 1, j) = 1.0;
    for (int j = 0; j < n; ++j) companion(j, n - 1) = -p.coeff(j).get_d() / lead;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion);

    IntPolynomial dp = p.derivative();
    for (int j = 0; j < n; ++j) {
        std::complex<double> r = solver.eigenvalues()[j];
        for (int it = 0; it < 30; ++it) {
            std::complex<double> pv = p.eval(r);
            std::complex<double> dv = dp.eval(r);
            if (std::abs(dv) == 0.0) break;
            std::complex<double> step = pv / dv;
            r -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(r))) break;
        }
        if (std::abs(r.imag()) > 1e-8 * (1.0 + std::abs(r.real()))) continue;
        double cand = r.real();
        bool dup = false;
        for (double seen : report.real_roots) dup = dup || std::abs(seen - cand) < 1e-7;
        if (dup) continue;

        double delta = 1e-6 * (1.0 + std::abs(cand));
        mpq_class lo(cand - delta), hi(cand + delta);
        int slo = sgn(p.eval_exact(lo)), shi = sgn(p.eval_exact(hi));
        bool certified = slo * shi < 0 || slo == 0 || shi == 0;
        if (!certified) {
            // no sign change: accept only if the residual is at root-level
            double scale = 0.0;
            for (int d = 0; d <= n; ++d)
                scale = std::max(scale, std::abs(p.coeff(d).get_d()) * std::pow(std::abs(cand), d));
            certified = std::abs(p.eval(std::complex<double>(cand, 0.0))) < 1e-10 * (1.0 + scale);
        }
        if (certified) report.real_roots.push_back(cand);
    }
    std::sort(report.real_roots.begin(), report.real_roots.end());
    report.nodeless = report.real_roots.empty();
    return report;
}

// Wronskian of the pseudo-Hermite seed pair, divided by its e^{z^2} factor:
// g = 2 m2 H_{m1} H_{m2-1} - 2 m1 H_{m1-1} H_{m2}. Exact and antisymmetric.
inline IntPolynomial wronskian_seed(int m1, int m2) {
    if (m1 < 0 || m2 < 0) throw DomainError("wronskian_seed: negative index");
    IntPolynomial g;
    if (m2 > 0) g = g + mpz_class(2 * m2) * (pseudo_hermite_poly(m1) * pseudo_hermite_poly(m2 - 1));
    if (m1 > 0) g = g - mpz_class(2 * m1) * (pseudo_hermite_poly(m1 - 1) * pseudo_hermite_poly(m2));
    return g;
}

// W(z) = linear*z + scale*num/den; the first-order pieces of the chain.
struct Superpotential {
    double linear = 0.0;
    RationalTerm rational;

    double operator()(double z) const { return linear * z + rational.eval(z); }
};

inline Superpotential superpotential_w1(const SeedSpec& spec) {
    if (spec.order != 1) throw DomainError("superpotential_w1 requires a one-step seed");
    if (spec.family == SeedFamily::GaussianGround) return {1.0, {}};
    IntPolynomial h = pseudo_hermite_poly(spec.m1);
    if (!nodeless_check(h).nodeless)
        throw NodelessnessError("one-step seed polynomial has real roots");
    return {-1.0, RationalTerm::make(-h.derivative(), h)};
}

inline Superpotential superpotential_w2(const SeedSpec& spec) {
    if (spec.order != 2) throw DomainError("superpotential_w2 requires a two-step seed");
    IntPolynomial h = pseudo_hermite_poly(spec.m1);
    IntPolynomial g = wronskian_seed(spec.m1, spec.m2);
    if (!nodeless_check(g).nodeless)
        throw NodelessnessError("Wronskian seed has real roots; chain is singular");
    return {-1.0, RationalTerm::make(h.derivative() * g - h * g.derivative(), h * g)};
}

// z-shape of the potential and invariant deformation: V_k = V0 + D(z)/sigma^2
// and I_k = I_0 + D(z) share the same D = constant + rational.
struct Deformation {
    mpq_class constant{0};
    RationalTerm rational;

    double eval(double z) const { return constant.get_d() + rational.eval(z); }
};

inline Deformation deformation_v1(const SeedSpec& spec) {
    if (spec.order != 1) throw DomainError("deformation_v1 requires a one-step seed");
    if (spec.family == SeedFamily::GaussianGround) return {2, {}};
    IntPolynomial h = pseudo_hermite_poly(spec.m1);
    if (!nodeless_check(h).nodeless)
        throw NodelessnessError("one-step seed polynomial has real roots");
    return {-2, mpq_class(-2) * log_second_derivative(h)};
}

inline Deformation deformation_v2(const SeedSpec& spec) {
    if (spec.order != 2) throw DomainError("deformation_v2 requires a two-step seed");
    IntPolynomial g = wronskian_seed(spec.m1, spec.m2);
    if (!nodeless_check(g).nodeless)
        throw NodelessnessError("Wronskian seed has real roots; potential is singular");
    return {-4, mpq_class(-2) * log_second_derivative(g)};
}

inline double moving_frame_z(const ClassicalState& cs, double x) {
    return (x + cs.gamma) / cs.sigma;
}

inline double potential_v0(const ClassicalState& cs, const FrequencyProfile& profile, double x) {
    return omega2_at(profile, cs.t) * x * x + force_at(profile, cs.t) * x;
}

inline double potential_v1(const SeedSpec& spec, const ClassicalState& cs,
                           const FrequencyProfile& profile, double x) {
    Deformation d = deformation_v1(spec);
    double z = moving_frame_z(cs, x);
    return potential_v0(cs, profile, x) + d.eval(z) / (cs.sigma * cs.sigma);
}

inline double potential_v2(const SeedSpec& spec, const ClassicalState& cs,
                           const FrequencyProfile& profile, double x) {
    Deformation d = deformation_v2(spec);
    double z = moving_frame_z(cs, x);
    return potential_v0(cs, profile, x) + d.eval(z) / (cs.sigma * cs.sigma);
}

// Seed of the second step expressed in the once-transformed problem:
// v = W(u1,u2)/u1 = e^{z^2/2} g(z)/H_{m1}(z), satisfying
// -v'' + (z^2 + 2 W1') v = eps2 v.
inline double two_step_partner_seed(const SeedSpec& spec, double z) {
    if (spec.order != 2) throw DomainError("two_step_partner_seed requires a two-step seed");
    IntPolynomial g = wronskian_seed(spec.m1, spec.m2);
    IntPolynomial h = pseudo_hermite_poly(spec.m1);
    return std::exp(0.5 * z * z) * g.eval<double>(z) / h.eval<double>(z);
}

}  // namespace parosc
