#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "parosc/classical.hpp"
#include "parosc/factorization.hpp"
#include "parosc/grid.hpp"
#include "parosc/specfun.hpp"

namespace parosc {

// ---------------------------------------------------------------------------
// Spectra of the deformed invariants I_k.
//
// I_0 has eigenvalues 2n+1.  A one-step chain built on the pseudo-Hermite
// seed H_m adds the missing level eps_1 = -2m-1 below the mapped spectrum;
// the two-step chain adds eps_2 = -2*m2-1 and eps_1 = -2*m1-1.  The
// Gaussian-ground seed is shape invariant: no level is added and the mapped
// levels sit at 2n+3.
// ---------------------------------------------------------------------------

struct SpectrumLevel {
    int n = 0;
    double lambda = 0.0;
    bool missing = false;  // level absent from the mapped image of I_0
};

struct SpectrumTable {
    int k = 0;
    std::vector<SpectrumLevel> levels;
};

namespace detail {

inline void check_chain_index(int k, int n, const SeedSpec& spec) {
    if (k < 0 || k > 2) throw DomainError("chain order k must be 0, 1 or 2");
    if (n < 0) throw DomainError("state index must be non-negative");
    if (k >= 1 && spec.order < 1)
        throw DomainError("one-step states need a factorization seed");
    if (k == 2 && spec.order != 2)
        throw DomainError("two-step states need a two-step seed spec");
    if (k == 2 && spec.family == SeedFamily::GaussianGround)
        throw DomainError("two-step chain is defined for pseudo-Hermite seeds");
}

}  // namespace detail

inline double state_lambda(int k, int n, const SeedSpec& spec) {
    detail::check_chain_index(k, n, spec);
    if (k == 0) return 2.0 * n + 1.0;
    if (k == 1) {
        // The Gaussian-ground chain keeps no extra level: B_1 = A lowers, so
        // the mapped spectrum starts at 3.  Pseudo-Hermite chains (m = 0
        // included) gain the missing level eps_1 below the mapped image.
        if (spec.family == SeedFamily::GaussianGround) return 2.0 * n + 3.0;
        if (n == 0) return static_cast<double>(spec.epsilon1());
        return 2.0 * (n - 1) + 1.0;
    }
    if (n == 0) return static_cast<double>(spec.epsilon2());
    if (n == 1) return static_cast<double>(spec.epsilon1());
    return 2.0 * (n - 2) + 1.0;
}

inline SpectrumTable spectrum(int k, const SeedSpec& spec, int n_max) {
    if (n_max < 0) throw DomainError("n_max must be non-negative");
    SpectrumTable table;
    table.k = k;
    for (int n = 0; n <= n_max; ++n) {
        bool missing = false;
        if (k == 1 && spec.family != SeedFamily::GaussianGround) missing = (n == 0);
        if (k == 2) missing = (n <= 1);
        table.levels.push_back({n, state_lambda(k, n, spec), missing});
    }
    return table;
}

// ---------------------------------------------------------------------------
// Closed-form eigenstates of I_k.
//
// Every state in the chain takes the moving-frame form
//     phi(x,t) = N * exp((-1/2 + i sigma sigma_dot/4) z^2 - i gamma_dot x/2)
//                  * num(z)/den(z) / sqrt(sigma),     z = (x+gamma)/sigma,
// with a time-independent rational profile num/den and a positive constant N
// that normalizes phi at every t.
// ---------------------------------------------------------------------------

struct EigenState {
    int k = 0;
    int n = 0;
    double lambda = 0.0;
    bool missing = false;
    double norm_constant = 0.0;
    IntPolynomial num;
    IntPolynomial den;
};

namespace detail {

inline double factorial_d(int n) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    return f.get_d();
}

inline double pow2_d(int n) { return std::ldexp(1.0, n); }

constexpr double kSqrtPi = 1.7724538509055160273;

// First-step image of H_j under B_1 for the pseudo-Hermite seed H_m:
// P_j = -(H_m H_{j+1} + 2m H_{m-1} H_j).
inline IntPolynomial one_step_numerator(int m, int j) {
    IntPolynomial p = pseudo_hermite_poly(m) * hermite_poly(j + 1);
    if (m > 0) {
        p = p + mpz_class(2 * m) * (pseudo_hermite_poly(m - 1) * hermite_poly(j));
    }
    return -p;
}

// Second-step image: Q_j = [g (P_j' - 2z P_j) - g' P_j] / H_{m1}, an exact
// polynomial division.
inline IntPolynomial two_step_numerator(int m1, int m2, int j) {
    IntPolynomial p = one_step_numerator(m1, j);
    IntPolynomial g = wronskian_seed(m1, m2);
    IntPolynomial z = IntPolynomial::monomial(1);
    IntPolynomial raw = g * (p.derivative() - mpz_class(2) * (z * p)) - g.derivative() * p;
    return raw.divide_exact(pseudo_hermite_poly(m1));
}

}  // namespace detail

inline EigenState eigen_state(int k, int n, const SeedSpec& spec) {
    detail::check_chain_index(k, n, spec);
    EigenState st;
    st.k = k;
    st.n = n;
    st.lambda = state_lambda(k, n, spec);
    st.den = IntPolynomial::constant(1);

    if (k == 0 || (k == 1 && spec.family == SeedFamily::GaussianGround)) {
        st.num = hermite_poly(n);
        st.norm_constant =
            1.0 / std::sqrt(detail::pow2_d(n) * detail::factorial_d(n) * detail::kSqrtPi);
        return st;
    }

    if (k == 1) {
        int m = spec.m1;
        st.den = pseudo_hermite_poly(m);
        if (n == 0) {
            st.missing = true;
            st.num = IntPolynomial::constant(1);
            st.norm_constant =
                std::sqrt(detail::pow2_d(m) * detail::factorial_d(m) / detail::kSqrtPi);
            return st;
        }
        int j = n - 1;
        st.num = detail::one_step_numerator(m, j);
        st.norm_constant = 1.0 / std::sqrt(detail::pow2_d(j + 1) * detail::factorial_d(j) *
                                           (j + m + 1) * detail::kSqrtPi);
        return st;
    }

    int m1 = spec.m1;
    int m2 = spec.m2;
    st.den = wronskian_seed(m1, m2);
    if (auto report = nodeless_check(st.den); !report.nodeless)
        throw NodelessnessError("two-step denominator has real zeros");
    if (n == 0) {
        st.missing = true;
        st.num = pseudo_hermite_poly(m1);
        st.norm_constant = std::sqrt(detail::pow2_d(m2 + 1) * detail::factorial_d(m2) *
                                     (m2 - m1) / detail::kSqrtPi);
        return st;
    }
    if (n == 1) {
        st.missing = true;
        st.num = pseudo_hermite_poly(m2);
        st.norm_constant = std::sqrt(detail::pow2_d(m1 + 1) * detail::factorial_d(m1) *
                                     (m2 - m1) / detail::kSqrtPi);
        return st;
    }
    int j = n - 2;
    st.num = detail::two_step_numerator(m1, m2, j);
    st.norm_constant = 1.0 / std::sqrt(detail::kSqrtPi * detail::pow2_d(j + 2) *
                                       detail::factorial_d(j) * (j + m1 + 1) * (j + m2 + 1));
    return st;
}

// ---------------------------------------------------------------------------
// Reduced-gauge operator actions.
//
// Conjugating by sqrt(sigma) exp(-S) turns the physical operators into pure
// z-side actions on the rational profile R(z):
//     A       R -> R'
//     A^+     R -> 2z R - R'
//     I_0     R -> -R'' + 2z R' + R
//     B_1     R -> R' - (2z + Hm'/Hm) R        (seed H_m; Gaussian seed: R')
//     B_1^+   R -> -R' - (Hm'/Hm) R            (Gaussian seed: 2z R - R')
//     B_2     R -> R' - (2z + g'/g - Hm1'/Hm1) R
//     B_2^+   R -> -R' + (Hm1'/Hm1 - g'/g) R
//     I_k     R -> I_0 R + D_k R
// These let the operator route be carried out in exact rational arithmetic.
// ---------------------------------------------------------------------------

enum class ReducedOp {
    Lower,
    Raise,
    StepOne,
    StepOneAdj,
    StepTwo,
    StepTwoAdj,
    Invariant0,
    Invariant1,
    Invariant2,
};

inline RationalTerm reduced_apply(ReducedOp op, const SeedSpec& spec, const RationalTerm& r) {
    const IntPolynomial z = IntPolynomial::monomial(1);
    auto times_2z = [&](const RationalTerm& s) {
        return RationalTerm::make(mpz_class(2) * (z * s.num), s.den, s.scale);
    };
    auto log_deriv = [](const IntPolynomial& p) {
        return RationalTerm::make(p.derivative(), p);
    };

    switch (op) {
        case ReducedOp::Lower:
            return r.derivative();
        case ReducedOp::Raise:
            return times_2z(r) - r.derivative();
        case ReducedOp::StepOne: {
            if (spec.family == SeedFamily::GaussianGround) return r.derivative();
            auto h = pseudo_hermite_poly(spec.m1);
            return r.derivative() - times_2z(r) - log_deriv(h) * r;
        }
        case ReducedOp::StepOneAdj: {
            if (spec.family == SeedFamily::GaussianGround) return times_2z(r) - r.derivative();
            auto h = pseudo_hermite_poly(spec.m1);
            return -r.derivative() - log_deriv(h) * r;
        }
        case ReducedOp::StepTwo: {
            auto h = pseudo_hermite_poly(spec.m1);
            auto g = wronskian_seed(spec.m1, spec.m2);
            return r.derivative() - times_2z(r) - log_deriv(g) * r + log_deriv(h) * r;
        }
        case ReducedOp::StepTwoAdj: {
            auto h = pseudo_hermite_poly(spec.m1);
            auto g = wronskian_seed(spec.m1, spec.m2);
            return -r.derivative() + log_deriv(h) * r - log_deriv(g) * r;
        }
        case ReducedOp::Invariant0:
            return -r.derivative().derivative() + times_2z(r.derivative()) + r;
        case ReducedOp::Invariant1: {
            auto base = reduced_apply(ReducedOp::Invariant0, spec, r);
            auto d = deformation_v1(spec);
            return base + RationalTerm::constant(d.constant) * r + d.rational * r;
        }
        case ReducedOp::Invariant2: {
            auto base = reduced_apply(ReducedOp::Invariant0, spec, r);
            auto d = deformation_v2(spec);
            return base + RationalTerm::constant(d.constant) * r + d.rational * r;
        }
    }
    throw ContractError("unhandled reduced operator");
}

// Operator-route construction of the mapped chain states: apply B_1 (and B_2)
// to the k=0 profile and divide by sqrt(lambda - eps) per step.  The result
// equals the closed form up to floating-point roundoff in the constants.
struct RoutedState {
    double lambda = 0.0;
    double constant = 0.0;   // signed real prefactor multiplying content
    RationalTerm content;    // exact rational profile in z
};

inline RoutedState eigen_state_operator_route(int k, int n, const SeedSpec& spec) {
    detail::check_chain_index(k, n, spec);
    if (k == 0) throw DomainError("operator route starts from the k=0 chain");

    RoutedState out;
    out.lambda = state_lambda(k, n, spec);

    if (k == 1 && spec.family != SeedFamily::GaussianGround && n == 0)
        throw DomainError("missing state has no operator route");
    if (k == 2 && n == 0) throw DomainError("missing state has no operator route");

    if (k == 2 && n == 1) {
        // Second-step image of the first-step missing state.
        EigenState anchor = eigen_state(1, 0, SeedSpec::one_step(spec.m1));
        RationalTerm r = RationalTerm::make(anchor.num, anchor.den);
        r = reduced_apply(ReducedOp::StepTwo, spec, r);
        double eps1 = static_cast<double>(spec.epsilon1());
        double eps2 = static_cast<double>(spec.epsilon2());
        out.constant = anchor.norm_constant / std::sqrt(eps1 - eps2);
        out.content = r;
        return out;
    }

    // B_1 = A lowers on the Gaussian-ground chain, so its route starts one
    // level above; the pseudo-Hermite routes start one (two) levels below.
    int base_n;
    if (k == 1 && spec.family == SeedFamily::GaussianGround)
        base_n = n + 1;
    else
        base_n = (k == 1) ? n - 1 : n - 2;
    EigenState base = eigen_state(0, base_n, spec);
    RationalTerm r = RationalTerm::from_polynomial(base.num);
    double constant = base.norm_constant;

    r = reduced_apply(ReducedOp::StepOne, spec, r);
    constant /= std::sqrt(base.lambda - static_cast<double>(spec.epsilon1()));
    if (k == 2) {
        r = reduced_apply(ReducedOp::StepTwo, spec, r);
        constant /= std::sqrt(base.lambda - static_cast<double>(spec.epsilon2()));
    }
    out.constant = constant;
    out.content = r;
    return out;
}

// ---------------------------------------------------------------------------
// Pointwise evaluation.
// ---------------------------------------------------------------------------

// Analytic value and x-derivatives of one chain state at a fixed time.
class StateEvaluator {
  public:
    StateEvaluator(EigenState state, const ClassicalState& cs)
        : state_(std::move(state)), cs_(cs) {
        s2_ = std::complex<double>(-0.5, 0.25 * cs_.sigma * cs_.sigma_dot);
        s1_ = std::complex<double>(0.0, -0.5 * cs_.gamma_dot);
        dnum_ = state_.num.derivative();
        ddnum_ = dnum_.derivative();
        dden_ = state_.den.derivative();
        ddden_ = dden_.derivative();
        prefactor_ = state_.norm_constant / std::sqrt(cs_.sigma);
    }

    double z_of(double x) const { return (x + cs_.gamma) / cs_.sigma; }

    std::complex<double> operator()(double x) const { return eval<0>(x); }
    std::complex<double> dx(double x) const { return eval<1>(x); }
    std::complex<double> dxx(double x) const { return eval<2>(x); }

    const EigenState& state() const { return state_; }
    const ClassicalState& classical() const { return cs_; }

  private:
    template <int Order>
    std::complex<double> eval(double x) const {
        const double z = z_of(x);
        const double inv_sigma = 1.0 / cs_.sigma;
        const double N = state_.num.eval<double>(z);
        const double D = state_.den.eval<double>(z);
        // Rational profile and its z-derivatives without dividing by num.
        const double W = N / D;
        std::complex<double> phase = std::exp(s2_ * (z * z) + s1_ * x);
        std::complex<double> base = prefactor_ * phase;
        if constexpr (Order == 0) return base * W;

        const double Np = dnum_.eval<double>(z);
        const double Dp = dden_.eval<double>(z);
        const double Wz = (Np * D - N * Dp) / (D * D);
        const std::complex<double> Sx = 2.0 * s2_ * z * inv_sigma + s1_;
        if constexpr (Order == 1) return base * (Sx * W + Wz * inv_sigma);

        const double Npp = ddnum_.eval<double>(z);
        const double Dpp = ddden_.eval<double>(z);
        const double Wzz =
            (Npp * D * D - N * Dpp * D - 2.0 * Np * Dp * D + 2.0 * N * Dp * Dp) / (D * D * D);
        const std::complex<double> Sxx = 2.0 * s2_ * inv_sigma * inv_sigma;
        return base * ((Sxx + Sx * Sx) * W + 2.0 * Sx * Wz * inv_sigma +
                       Wzz * inv_sigma * inv_sigma);
    }

    EigenState state_;
    ClassicalState cs_;
    std::complex<double> s2_;
    std::complex<double> s1_;
    IntPolynomial dnum_, ddnum_, dden_, ddden_;
    double prefactor_ = 0.0;
};

// Default sampling window: centered on the wavepacket at -gamma(t), wide
// enough that the outermost turning point of the highest requested level
// sits eight widths inside the boundary.
inline Grid default_grid(const ClassicalState& cs, int n_max, int samples = 2048) {
    double half_width = cs.sigma * (std::sqrt(2.0 * n_max + 1.0) + 8.0);
    return Grid::centered(-cs.gamma, half_width, samples);
}

inline WaveField sample_state(const StateEvaluator& ev, const Grid& grid) {
    WaveField f;
    f.grid = grid;
    f.t = ev.classical().t;
    f.values.resize(grid.n);
    for (int i = 0; i < grid.n; ++i) f.values[i] = ev(grid.x(i));
    f.metadata["k"] = std::to_string(ev.state().k);
    f.metadata["n"] = std::to_string(ev.state().n);
    f.metadata["lambda"] = std::to_string(ev.state().lambda);
    require_tail_clear(f);
    return f;
}

inline WaveField eigenfunction(int k, int n, const SeedSpec& spec, const ClassicalState& cs,
                               const Grid& grid) {
    return sample_state(StateEvaluator(eigen_state(k, n, spec), cs), grid);
}

inline WaveField eigenfunction(int k, int n, const SeedSpec& spec, const ClassicalState& cs) {
    return eigenfunction(k, n, spec, cs, default_grid(cs, std::max(n, 4)));
}

// Operator-route field for cross-checking the closed form.
inline WaveField routed_field(const RoutedState& rs, const ClassicalState& cs, const Grid& grid) {
    EigenState st;
    st.lambda = rs.lambda;
    st.norm_constant = rs.constant * rs.content.scale.get_d();
    st.num = rs.content.num;
    st.den = rs.content.den;
    return sample_state(StateEvaluator(st, cs), grid);
}

// ---------------------------------------------------------------------------
// Time-dependent phases and full Schrodinger solutions.
//
// psi_n(x,t) = exp(i chi_n(t)) phi_n(x,t) with
//     chi_n = -lambda_n tau(t) - gamma gamma_dot / 4 + (1/2) int_0^t F gamma.
// ---------------------------------------------------------------------------

struct PhaseRecord {
    int k = 0;
    int n = 0;
    double t = 0.0;
    double lambda = 0.0;
    double tau = 0.0;
    double chi = 0.0;
};

inline PhaseRecord chi_phase(int k, int n, const SeedSpec& spec, const ClassicalContext& ctx,
                             double t) {
    PhaseRecord rec;
    rec.k = k;
    rec.n = n;
    rec.t = t;
    rec.lambda = state_lambda(k, n, spec);
    ClassicalState cs = ctx.state(t);
    rec.tau = cs.tau;
    rec.chi = -rec.lambda * cs.tau - 0.25 * cs.gamma * cs.gamma_dot +
              0.5 * ctx.force_path_integral(t);
    return rec;
}

inline PhaseRecord chi_phase(int k, int n, const SeedSpec& spec, const FrequencyProfile& profile,
                             const ErmakovParams& params, double t) {
    ClassicalContext ctx(profile, params);
    return chi_phase(k, n, spec, ctx, t);
}

inline WaveField schrodinger_solution(int k, int n, const SeedSpec& spec,
                                      const ClassicalContext& ctx, const Grid& grid, double t) {
    ClassicalState cs = ctx.state(t);
    WaveField f = eigenfunction(k, n, spec, cs, grid);
    PhaseRecord rec = chi_phase(k, n, spec, ctx, t);
    std::complex<double> phase = std::exp(std::complex<double>(0.0, rec.chi));
    for (auto& v : f.values) v *= phase;
    f.metadata["chi"] = std::to_string(rec.chi);
    return f;
}

// ---------------------------------------------------------------------------
// Quadrature expectations.
// ---------------------------------------------------------------------------

// <x> and <p> from the sampled field; p = -i d/dx via a 6th-order stencil.
inline std::pair<double, double> quadrature_expectations(const WaveField& f) {
    int m = std::max(f.margin, 3);
    const double dx = f.grid.dx;
    double norm2 = 0.0, xbar = 0.0, pbar = 0.0;
    for (int i = m; i < f.grid.n - m; ++i) {
        double w = std::norm(f.values[i]);
        norm2 += w;
        xbar += f.grid.x(i) * w;
        std::complex<double> d = (-f.values[i - 3] + 9.0 * f.values[i - 2] -
                                  45.0 * f.values[i - 1] + 45.0 * f.values[i + 1] -
                                  9.0 * f.values[i + 2] + f.values[i + 3]) /
                                 (60.0 * dx);
        // <p> integrand: Re[conj(psi) * (-i psi')] = Im[conj(psi) * psi'].
        pbar += std::imag(std::conj(f.values[i]) * d);
    }
    if (!(norm2 > 0.0)) throw GridError("expectation of an empty field");
    return {xbar / norm2, pbar / norm2};
}

// Closed-form counterpart: every chain state rides the classical trajectory,
// <x> = -gamma(t), <p> = -gamma_dot(t)/2.
inline std::pair<double, double> classical_expectations(const ClassicalState& cs) {
    return {-cs.gamma, -0.5 * cs.gamma_dot};
}

}  // namespace parosc
