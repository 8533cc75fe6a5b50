#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "parosc/classical.hpp"
#include "parosc/factorization.hpp"
#include "parosc/grid.hpp"
#include "parosc/operators.hpp"

namespace parosc {

// Crank-Nicolson propagator for i psi_t = (-d^2/dx^2 + V_k(x,t)) psi, the
// ground truth the analytic families are checked against. The scheme is the
// standard unitary one: (1 + i dt/2 H(t+dt/2)) psi' = (1 - i dt/2 H(t+dt/2)) psi
// with a 3-point Laplacian, hard walls at the grid ends, and a tridiagonal
// Thomas solve per step.

// Potential level k in {0,1,2} with its seed, the classical background that
// fixes sigma/gamma, the grid and the stepping window.
struct PropagationPlan {
    int k = 0;
    std::optional<SeedSpec> spec;
    FrequencyProfile profile;
    ErmakovParams params;
    Grid grid;
    double t_a = 0.0;
    double t_b = M_PI;
    double dt = 2.5e-4;
    int snapshot_stride = 250;  // keep every this-many steps, plus both ends
};

struct Trajectory {
    std::vector<WaveField> snapshots;
    FrequencyProfile profile;
    ErmakovParams params;
    double dt = 0.0;            // actual step after fitting the window
    long long steps = 0;
    double norm_drift = 0.0;    // max | ||psi|| - ||psi_0|| | over the run
    double boundary_mass = 0.0; // max mass in the outermost cells over the run
};

namespace detail {

// Deformation D_k(z) with the exact coefficients flattened to doubles once,
// so the per-step potential fill is a plain Horner pass.
struct PotentialTable {
    int k = 0;
    bool has_deformation = false;
    double constant = 0.0;
    bool has_rational = false;
    std::vector<double> num;  // rational scale folded into the numerator
    std::vector<double> den;

    static PotentialTable build(int k, const std::optional<SeedSpec>& spec) {
        PotentialTable t;
        t.k = k;
        if (k == 0) return t;
        if (k != 1 && k != 2) throw DomainError("potential level k must be 0, 1 or 2");
        if (!spec) throw ContractError("deformed potential requires a seed");
        Deformation d;
        if (k == 1) {
            SeedSpec one = (spec->order == 2) ? SeedSpec::one_step(spec->m1) : *spec;
            d = deformation_v1(one);
        } else {
            if (spec->order != 2) throw ContractError("V2 requires a two-step seed");
            d = deformation_v2(*spec);
        }
        t.has_deformation = true;
        t.constant = d.constant.get_d();
        if (!d.rational.is_zero()) {
            t.has_rational = true;
            double s = d.rational.scale.get_d();
            for (const auto& c : d.rational.num.coefficients()) t.num.push_back(s * c.get_d());
            for (const auto& c : d.rational.den.coefficients()) t.den.push_back(c.get_d());
        }
        return t;
    }

    double deformation(double z) const {
        double v = constant;
        if (has_rational) {
            double p = 0.0, q = 0.0;
            for (std::size_t j = num.size(); j-- > 0;) p = p * z + num[j];
            for (std::size_t j = den.size(); j-- > 0;) q = q * z + den[j];
            v += p / q;
        }
        return v;
    }
};

}  // namespace detail

inline Trajectory propagate(const PropagationPlan& plan, const WaveField& psi0) {
    if (!psi0.grid.matches(plan.grid)) throw GridError("initial state is not on the plan grid");
    if (!(plan.dt > 0.0) || !(plan.t_b > plan.t_a))
        throw DomainError("propagation needs dt > 0 and t_b > t_a");
    if (std::abs(psi0.t - plan.t_a) > 1e-12 * (1.0 + std::abs(plan.t_a)))
        throw ContractError("initial state is stamped away from the window start");
    const double norm0 = field_norm(psi0);
    if (std::abs(norm0 - 1.0) > 1e-6) throw ContractError("initial state must be normalized");

    detail::PotentialTable table = detail::PotentialTable::build(plan.k, plan.spec);
    ClassicalContext ctx(plan.profile, plan.params);

    const int n = plan.grid.n;
    const double h = plan.grid.dx;
    const long long steps = std::llround((plan.t_b - plan.t_a) / plan.dt);
    if (steps < 1) throw DomainError("propagation window is shorter than one step");
    const double dt = (plan.t_b - plan.t_a) / double(steps);

    Trajectory out;
    out.profile = plan.profile;
    out.params = plan.params;
    out.dt = dt;
    out.steps = steps;

    std::vector<std::complex<double>> psi = psi0.values;
    psi.front() = 0.0;
    psi.back() = 0.0;

    const std::complex<double> im(0.0, 1.0);
    const std::complex<double> off = -im * dt / (2.0 * h * h);  // i dt/2 * (-1/h^2)
    std::vector<double> v(n, 0.0);
    std::vector<std::complex<double>> diag(n), rhs(n), scratch(n);

    auto record = [&](long long step) {
        WaveField f;
        f.grid = plan.grid;
        f.t = plan.t_a + double(step) * dt;
        f.margin = std::max(psi0.margin, 1);
        f.values = psi;
        f.metadata = psi0.metadata;
        f.metadata["source"] = "crank-nicolson";
        f.metadata["k"] = std::to_string(plan.k);
        out.snapshots.push_back(std::move(f));
    };
    record(0);

    for (long long step = 0; step < steps; ++step) {
        const double th = plan.t_a + (double(step) + 0.5) * dt;
        const double w2 = omega2_at(plan.profile, th);
        const double fr = force_at(plan.profile, th);
        if (table.has_deformation) {
            ClassicalState cs = ctx.state(th);
            const double inv_s2 = 1.0 / (cs.sigma * cs.sigma);
            for (int i = 1; i + 1 < n; ++i) {
                const double x = plan.grid.x(i);
                const double z = (x + cs.gamma) / cs.sigma;
                v[i] = w2 * x * x + fr * x + table.deformation(z) * inv_s2;
            }
        } else {
            for (int i = 1; i + 1 < n; ++i) {
                const double x = plan.grid.x(i);
                v[i] = w2 * x * x + fr * x;
            }
        }

        // rhs = (1 - i dt/2 H) psi on interior points, walls pinned to zero.
        for (int i = 1; i + 1 < n; ++i) {
            const std::complex<double> hc = im * (dt / 2.0) * (2.0 / (h * h) + v[i]);
            diag[i] = 1.0 + hc;
            rhs[i] = (1.0 - hc) * psi[i] - off * (psi[i - 1] + psi[i + 1]);
        }

        // Thomas sweep over the interior unknowns.
        std::complex<double> pivot = diag[1];
        if (std::abs(pivot) < 1e-12) throw NumericError("ill-conditioned tridiagonal solve");
        scratch[1] = off / pivot;
        rhs[1] /= pivot;
        for (int i = 2; i + 1 < n; ++i) {
            pivot = diag[i] - off * scratch[i - 1];
            if (std::abs(pivot) < 1e-12) throw NumericError("ill-conditioned tridiagonal solve");
            scratch[i] = off / pivot;
            rhs[i] = (rhs[i] - off * rhs[i - 1]) / pivot;
        }
        psi[n - 2] = rhs[n - 2];
        for (int i = n - 3; i >= 1; --i) psi[i] = rhs[i] - scratch[i] * psi[i + 1];

        // Unitarity and wall monitors.
        double mass = 0.0, tail = 0.0;
        for (int i = 1; i + 1 < n; ++i) mass += std::norm(psi[i]);
        for (int i = 1; i <= 8; ++i) tail += std::norm(psi[i]) + std::norm(psi[n - 1 - i]);
        mass *= h;
        tail *= h;
        out.norm_drift = std::max(out.norm_drift, std::abs(std::sqrt(mass) - norm0));
        out.boundary_mass = std::max(out.boundary_mass, tail);
        if (out.boundary_mass > 1e-8)
            throw GridError("boundary reflection: wave packet reached the grid ends");
        if (out.norm_drift > 1e-8)
            throw NumericError("Crank-Nicolson norm drift above tolerance");

        if ((step + 1) % plan.snapshot_stride == 0 || step + 1 == steps) record(step + 1);
    }
    return out;
}

// max_t | <I_k>(t) - <I_k>(t_a) | along a propagated trajectory. The operator
// is rebuilt at every snapshot time from the trajectory's own classical
// background; pairing it with a mismatched Hamiltonian level is the intended
// negative control.
inline double invariant_drift(const Trajectory& traj, int k,
                              const std::optional<SeedSpec>& spec = std::nullopt) {
    if (traj.snapshots.empty()) throw DomainError("invariant drift needs a trajectory");
    if (k != 0 && !spec) throw ContractError("invariant drift for k >= 1 requires a seed");
    ClassicalContext ctx(traj.profile, traj.params);
    double first = 0.0, drift = 0.0;
    bool have_first = false;
    for (const WaveField& f : traj.snapshots) {
        ClassicalState cs = ctx.state(f.t);
        GridOperator op = (k == 0)
                              ? make_operator(OperatorKind::I0, cs)
                              : make_operator(k == 1 ? OperatorKind::I1 : OperatorKind::I2,
                                              cs, *spec);
        WaveField g = apply(op, f);
        double den = std::real(inner_product(f, f));
        if (!(den > 0.0)) throw GridError("invariant drift of a null snapshot");
        double e = std::real(inner_product(f, g)) / den;
        if (!have_first) {
            first = e;
            have_first = true;
        }
        drift = std::max(drift, std::abs(e - first));
    }
    return drift;
}

// | <a|b> | / (||a|| ||b||); 1 means the same ray.
inline double overlap_magnitude(const WaveField& a, const WaveField& b) {
    double na = field_norm(a), nb = field_norm(b);
    if (!(na > 0.0) || !(nb > 0.0)) throw GridError("overlap with a null field");
    return std::abs(inner_product(a, b)) / (na * nb);
}

}  // namespace parosc
