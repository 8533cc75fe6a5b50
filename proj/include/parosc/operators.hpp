#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "parosc/factorization.hpp"
#include "parosc/grid.hpp"

namespace parosc {

enum class OperatorKind { A, ADag, B1, B1Dag, B2, B2Dag, I0, I1, I2, H0, H1, H2 };

namespace detail {

inline bool needs_seed(OperatorKind k) {
    switch (k) {
        case OperatorKind::B1:
        case OperatorKind::B1Dag:
        case OperatorKind::B2:
        case OperatorKind::B2Dag:
        case OperatorKind::I1:
        case OperatorKind::I2:
        case OperatorKind::H1:
        case OperatorKind::H2:
            return true;
        default:
            return false;
    }
}

inline bool needs_profile(OperatorKind k) {
    return k == OperatorKind::H0 || k == OperatorKind::H1 || k == OperatorKind::H2;
}

inline bool two_step_kind(OperatorKind k) {
    return k == OperatorKind::B2 || k == OperatorKind::B2Dag || k == OperatorKind::I2 ||
           k == OperatorKind::H2;
}

}  // namespace detail

// One operator bound to a classical snapshot (and, where needed, a seed and
// the instantaneous potential coefficients).  Immutable; apply() is pure.
// stencil_order 4 is the default; 6 is available for deep operator
// compositions, where the roundoff roughness amplified by 1/h per
// differentiation stage puts a floor under the 4th-order truncation error.
struct GridOperator {
    OperatorKind kind = OperatorKind::A;
    ClassicalState cs;
    std::optional<SeedSpec> spec;
    double omega2 = 0.0;
    double force = 0.0;
    std::complex<double> xi;  // quadrature coefficient Xi(t) = -i/sigma + sigma_dot/2
    int stencil_order = 4;
};

inline GridOperator with_stencil_order(GridOperator op, int order) {
    if (order != 4 && order != 6) throw ContractError("stencil order must be 4 or 6");
    op.stencil_order = order;
    return op;
}

namespace detail {

inline GridOperator build_operator(OperatorKind kind, const ClassicalState& cs,
                                   std::optional<SeedSpec> spec,
                                   const FrequencyProfile* profile) {
    if (needs_seed(kind) && !spec)
        throw ContractError("operator kind requires a factorization seed");
    if (needs_profile(kind) && profile == nullptr)
        throw ContractError("hamiltonian kinds require a frequency profile");
    if (spec && two_step_kind(kind) && spec->order != 2)
        throw ContractError("two-step operator kind requires a two-step seed");
    GridOperator op;
    op.kind = kind;
    op.cs = cs;
    op.spec = spec;
    if (profile != nullptr) {
        op.omega2 = omega2_at(*profile, cs.t);
        op.force = force_at(*profile, cs.t);
    }
    op.xi = std::complex<double>(0.5 * cs.sigma_dot, -1.0 / cs.sigma);
    return op;
}

}  // namespace detail

inline GridOperator make_operator(OperatorKind kind, const ClassicalState& cs) {
    return detail::build_operator(kind, cs, std::nullopt, nullptr);
}

inline GridOperator make_operator(OperatorKind kind, const ClassicalState& cs,
                                  const SeedSpec& spec) {
    return detail::build_operator(kind, cs, spec, nullptr);
}

inline GridOperator make_operator(OperatorKind kind, const ClassicalState& cs,
                                  const FrequencyProfile& profile) {
    return detail::build_operator(kind, cs, std::nullopt, &profile);
}

inline GridOperator make_operator(OperatorKind kind, const ClassicalState& cs,
                                  const FrequencyProfile& profile, const SeedSpec& spec) {
    return detail::build_operator(kind, cs, spec, &profile);
}

inline WaveField apply(const GridOperator& op, const WaveField& f) {
    if (std::abs(f.t - op.cs.t) > 1e-12 * (1.0 + std::abs(f.t)))
        throw ContractError("operator and field time stamps differ");
    if (static_cast<int>(f.values.size()) != f.grid.n)
        throw GridError("field sample count does not match its grid");

    const double s = op.cs.sigma;
    const double sd = op.cs.sigma_dot;
    const double g = op.cs.gamma;
    const double W = op.cs.W;
    const std::complex<double> im(0.0, 1.0);

    // Multiplicative part of the intertwiners: B = A + (W_seed(z) - z).
    RationalTerm seed_rational;
    double seed_linear = 0.0;
    bool has_seed_mult = false;
    if (op.kind == OperatorKind::B1 || op.kind == OperatorKind::B1Dag) {
        SeedSpec one = (op.spec->order == 2) ? SeedSpec::one_step(op.spec->m1) : *op.spec;
        Superpotential w = superpotential_w1(one);
        seed_linear = w.linear - 1.0;
        seed_rational = w.rational;
        has_seed_mult = true;
    } else if (op.kind == OperatorKind::B2 || op.kind == OperatorKind::B2Dag) {
        Superpotential w = superpotential_w2(*op.spec);
        seed_linear = w.linear - 1.0;
        seed_rational = w.rational;
        has_seed_mult = true;
    }

    // Invariant/Hamiltonian deformations, applied in difference form.
    Deformation deform;
    bool has_deform = false;
    double deform_scale = 1.0;
    if (op.kind == OperatorKind::I1 || op.kind == OperatorKind::H1) {
        SeedSpec one = (op.spec->order == 2) ? SeedSpec::one_step(op.spec->m1) : *op.spec;
        deform = deformation_v1(one);
        has_deform = true;
    } else if (op.kind == OperatorKind::I2 || op.kind == OperatorKind::H2) {
        deform = deformation_v2(*op.spec);
        has_deform = true;
    }
    if (op.kind == OperatorKind::H1 || op.kind == OperatorKind::H2) deform_scale = 1.0 / (s * s);

    if (op.stencil_order != 4 && op.stencil_order != 6)
        throw ContractError("stencil order must be 4 or 6");
    const int half = op.stencil_order / 2;

    WaveField out;
    out.grid = f.grid;
    out.t = f.t;
    out.margin = f.margin + half;
    out.values.assign(f.grid.n, std::complex<double>(0.0, 0.0));
    out.metadata = f.metadata;

    const double h = f.grid.dx;
    const int lo = f.margin + half;
    const int hi = f.grid.n - f.margin - half;

    for (int i = lo; i < hi; ++i) {
        const double x = f.grid.x(i);
        const double z = (x + g) / s;
        const std::complex<double> v = f.values[i];
        std::complex<double> d1, d2;
        if (half == 2) {
            d1 = (f.values[i - 2] - 8.0 * f.values[i - 1] +
                  8.0 * f.values[i + 1] - f.values[i + 2]) /
                 (12.0 * h);
            d2 = (-f.values[i - 2] + 16.0 * f.values[i - 1] - 30.0 * f.values[i] +
                  16.0 * f.values[i + 1] - f.values[i + 2]) /
                 (12.0 * h * h);
        } else {
            d1 = (-f.values[i - 3] + 9.0 * f.values[i - 2] - 45.0 * f.values[i - 1] +
                  45.0 * f.values[i + 1] - 9.0 * f.values[i + 2] + f.values[i + 3]) /
                 (60.0 * h);
            d2 = (2.0 * f.values[i - 3] - 27.0 * f.values[i - 2] + 270.0 * f.values[i - 1] -
                  490.0 * f.values[i] + 270.0 * f.values[i + 1] - 27.0 * f.values[i + 2] +
                  2.0 * f.values[i + 3]) /
                 (180.0 * h * h);
        }

        std::complex<double> acc;
        switch (op.kind) {
            case OperatorKind::A:
            case OperatorKind::B1:
            case OperatorKind::B2:
                acc = s * d1 +
                      ((1.0 / s - im * 0.5 * sd) * x + (g / s + im * 0.5 * W)) * v;
                break;
            case OperatorKind::ADag:
            case OperatorKind::B1Dag:
            case OperatorKind::B2Dag:
                acc = -s * d1 +
                      ((1.0 / s + im * 0.5 * sd) * x + (g / s - im * 0.5 * W)) * v;
                break;
            case OperatorKind::I0:
            case OperatorKind::I1:
            case OperatorKind::I2: {
                std::complex<double> c0 =
                    (0.25 * sd * sd + 1.0 / (s * s)) * x * x +
                    (2.0 * g / (s * s) - 0.5 * W * sd) * x + g * g / (s * s) +
                    0.25 * W * W + im * 0.5 * s * sd;
                acc = -s * s * d2 + im * s * (sd * x - W) * d1 + c0 * v;
                break;
            }
            case OperatorKind::H0:
            case OperatorKind::H1:
            case OperatorKind::H2:
                acc = -d2 + (op.omega2 * x * x + op.force * x) * v;
                break;
        }
        if (has_seed_mult) acc += (seed_linear * z + seed_rational.eval(z)) * v;
        if (has_deform) acc += deform_scale * deform.eval(z) * v;
        out.values[i] = acc;
    }
    return out;
}

inline WaveField commutator_apply(const GridOperator& a, const GridOperator& b,
                                  const WaveField& f) {
    WaveField ab = apply(a, apply(b, f));
    WaveField ba = apply(b, apply(a, f));
    for (int i = 0; i < ab.grid.n; ++i) ab.values[i] -= ba.values[i];
    return ab;
}

// || got - want || / || want ||, over the union of the two margins.
inline double relative_residual(const WaveField& got, const WaveField& want) {
    if (!got.grid.matches(want.grid)) throw GridError("residual requires matching grids");
    int m = std::max(got.margin, want.margin);
    double num = 0.0, den = 0.0;
    for (int i = m; i < got.grid.n - m; ++i) {
        num += std::norm(got.values[i] - want.values[i]);
        den += std::norm(want.values[i]);
    }
    if (!(den > 0.0)) throw GridError("residual against a null field");
    return std::sqrt(num / den);
}

inline double adjoint_defect(const GridOperator& op, const GridOperator& op_dag,
                             const WaveField& f, const WaveField& g) {
    std::complex<double> lhs = inner_product(apply(op_dag, f), g);
    std::complex<double> rhs = inner_product(f, apply(op, g));
    return std::abs(lhs - rhs);
}

// || LHS f - RHS f || / || f || for the chain intertwining relations.
//   order 1:  B1 I0 = I1 B1      (adjoint: B1^+ I1 = I0 B1^+)
//   order 2:  I2 B2 B1 = B2 B1 I0  (adjoint: I0 B1^+ B2^+ = B1^+ B2^+ I2)
inline double intertwine_residual(int order, const SeedSpec& spec, const ClassicalState& cs,
                                  const WaveField& f, bool adjoint = false,
                                  int stencil_order = 4) {
    double scale = field_norm(f);
    if (!(scale > 0.0)) throw GridError("intertwining residual of a null field");
    auto mk = [&](OperatorKind kind, bool seeded) {
        GridOperator op = seeded ? make_operator(kind, cs, spec) : make_operator(kind, cs);
        return with_stencil_order(op, stencil_order);
    };
    WaveField lhs = f, rhs = f;
    if (order == 1) {
        GridOperator b1 = mk(adjoint ? OperatorKind::B1Dag : OperatorKind::B1, true);
        GridOperator i0 = mk(OperatorKind::I0, false);
        GridOperator i1 = mk(OperatorKind::I1, true);
        lhs = adjoint ? apply(b1, apply(i1, f)) : apply(b1, apply(i0, f));
        rhs = adjoint ? apply(i0, apply(b1, f)) : apply(i1, apply(b1, f));
    } else if (order == 2) {
        GridOperator b1 = mk(adjoint ? OperatorKind::B1Dag : OperatorKind::B1, true);
        GridOperator b2 = mk(adjoint ? OperatorKind::B2Dag : OperatorKind::B2, true);
        GridOperator i0 = mk(OperatorKind::I0, false);
        GridOperator i2 = mk(OperatorKind::I2, true);
        if (adjoint) {
            lhs = apply(b1, apply(b2, apply(i2, f)));
            rhs = apply(i0, apply(b1, apply(b2, f)));
        } else {
            lhs = apply(i2, apply(b2, apply(b1, f)));
            rhs = apply(b2, apply(b1, apply(i0, f)));
        }
    } else {
        throw DomainError("intertwining order must be 1 or 2");
    }
    int m = std::max(lhs.margin, rhs.margin);
    double acc = 0.0;
    for (int i = m; i < f.grid.n - m; ++i) acc += std::norm(lhs.values[i] - rhs.values[i]);
    return std::sqrt(acc * f.grid.dx) / scale;
}

}  // namespace parosc
