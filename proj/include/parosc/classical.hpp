#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include "parosc/errors.hpp"
#include "parosc/profiles.hpp"
#include "parosc/specfun.hpp"

namespace parosc {

// Nonlinear superposition sigma^2 = a q1^2 + b q1 q2 + c q2^2 solves the
// Ermakov equation sigma'' + 4 Omega^2 sigma = 4 / sigma^3 exactly when
// b^2 - 4ac = -16 / w0^2.
struct ErmakovParams {
    double a = 1.0;
    double c = 1.0;
    double b = 0.0;
    std::complex<double> w0{2.0, 0.0};

    static ErmakovParams make(const FrequencyProfile& profile, double a, double c,
                              bool negative_branch = false) {
        if (!(a > 0.0) || !(c > 0.0))
            throw DomainError("ErmakovParams: superposition weights a, c must be positive");
        validate(profile);
        if (const auto* p = std::get_if<SechPulse>(&profile)) {
            (void)p;
            if (std::abs(a - c) > 1e-12 * (a + c))
                throw DomainError("ErmakovParams: sech profile requires a = c for a real sigma");
        }
        std::complex<double> w0 = wronskian_constant(profile);
        std::complex<double> bsq = 4.0 * a * c - 16.0 / (w0 * w0);
        if (std::abs(bsq.imag()) > 1e-10 * (1.0 + std::abs(bsq)))
            throw DomainError("ErmakovParams: b^2 is not real for this basis");
        if (bsq.real() < 0.0)
            throw DomainError("ErmakovParams: 4ac < 16/w0^2 leaves no real b");
        ErmakovParams out;
        out.a = a;
        out.c = c;
        out.b = (negative_branch ? -1.0 : 1.0) * std::sqrt(bsq.real());
        out.w0 = w0;
        return out;
    }
};

struct LinearBasis {
    std::complex<double> q1, q1_dot, q2, q2_dot, w0;
};

struct ClassicalState {
    double t = 0.0;
    double sigma = 1.0;
    double sigma_dot = 0.0;
    double gamma = 0.0;
    double gamma_dot = 0.0;
    double W = 0.0;    // sigma gamma_dot - sigma_dot gamma
    double tau = 0.0;  // accumulated phase time, integral of 1/sigma^2 from 0
};

// Closed-form sech basis q1 = e^{i sqrt(omega1) (t-t0)} 2F1(1/2+nu, 1/2-nu;
// 1-i beta; (1-y)/2) with y = tanh k(t-t0), beta = sqrt(omega1)/k. Series
// convergence limits this to moderate |t - t0|; it anchors the ODE path.
inline double sech_nu(const SechPulse& p) {
    return std::sqrt(0.25 + p.omega2 / (p.k * p.k));
}

inline std::pair<std::complex<double>, std::complex<double>> sech_basis_closed_form(
    const SechPulse& p, double t) {
    double beta = std::sqrt(p.omega1) / p.k;
    double nu = sech_nu(p);
    std::complex<double> a{0.5 + nu, 0.0}, b{0.5 - nu, 0.0}, c{1.0, -beta};
    double y = std::tanh(p.k * (t - p.t0));
    double w = 0.5 * (1.0 - y);
    std::complex<double> f = gauss_2f1(HypergeometricParams{a, b, c, {w, 0.0}});
    std::complex<double> f1 = gauss_2f1(HypergeometricParams{a + 1.0, b + 1.0, c + 1.0, {w, 0.0}});
    std::complex<double> phase =
        std::exp(std::complex<double>(0.0, std::sqrt(p.omega1) * (t - p.t0)));
    std::complex<double> q1 = phase * f;
    std::complex<double> dfdt = (a * b / c) * f1 * (-0.5 * p.k * (1.0 - y * y));
    std::complex<double> q1_dot =
        std::complex<double>(0.0, std::sqrt(p.omega1)) * q1 + phase * dfdt;
    return {q1, q1_dot};
}

namespace detail {

// Deterministic checkpointed adaptive integrator: states at anchor + k*spacing
// are filled outward in order and cached, so the value at any t is independent
// of evaluation history.
template <std::size_t N>
class CheckpointedOde {
  public:
    using State = std::array<double, N>;
    using Rhs = std::function<void(const State&, State&, double)>;

    CheckpointedOde(Rhs rhs, double anchor, State init, double spacing = 0.0625)
        : rhs_(std::move(rhs)), anchor_(anchor), spacing_(spacing) {
        forward_.push_back(init);
        backward_.push_back(init);
    }

    State eval(double t) const {
        double offset = (t - anchor_) / spacing_;
        long long k = static_cast<long long>(std::floor(offset));
        if (t >= anchor_) {
            State s = checkpoint(k);
            return advance(s, anchor_ + k * spacing_, t);
        }
        State s = checkpoint(k + 1);
        return advance(s, anchor_ + (k + 1) * spacing_, t);
    }

  private:
    State advance(State s, double from, double to) const {
        if (from == to) return s;
        auto stepper = boost::numeric::odeint::make_controlled(
            1e-14, 1e-14, boost::numeric::odeint::runge_kutta_fehlberg78<State>());
        double dt = (to > from ? 1.0 : -1.0) * spacing_ / 8.0;
        boost::numeric::odeint::integrate_adaptive(stepper, rhs_, s, from, to, dt);
        return s;
    }

    const State& checkpoint(long long k) const {
        if (k >= 0) {
            while (static_cast<long long>(forward_.size()) <= k) {
                long long j = static_cast<long long>(forward_.size()) - 1;
                forward_.push_back(
                    advance(forward_.back(), anchor_ + j * spacing_, anchor_ + (j + 1) * spacing_));
            }
            return forward_[static_cast<std::size_t>(k)];
        }
        while (static_cast<long long>(backward_.size()) <= -k) {
            long long j = -(static_cast<long long>(backward_.size()) - 1);
            backward_.push_back(
                advance(backward_.back(), anchor_ + j * spacing_, anchor_ + (j - 1) * spacing_));
        }
        return backward_[static_cast<std::size_t>(-k)];
    }

    Rhs rhs_;
    double anchor_;
    double spacing_;
    mutable std::vector<State> forward_;   // forward_[k] = state at anchor + k*spacing
    mutable std::vector<State> backward_;  // backward_[k] = state at anchor - k*spacing
};

// Accumulated integral from an anchor with per-interval caching, so tau and
// the drive work integral stay continuous and history-independent.
class CheckpointedIntegral {
  public:
    CheckpointedIntegral(std::function<double(double)> f, double anchor, double spacing = 0.0625)
        : f_(std::move(f)), anchor_(anchor), spacing_(spacing) {
        forward_.push_back(0.0);
        backward_.push_back(0.0);
    }

    double eval(double t) const {
        double offset = (t - anchor_) / spacing_;
        long long k = static_cast<long long>(std::floor(offset));
        if (t >= anchor_) {
            double full = prefix_forward(k);
            return full + quad(anchor_ + k * spacing_, t);
        }
        double full = prefix_backward(k + 1);
        return full - quad(t, anchor_ + (k + 1) * spacing_);
    }

  private:
    double quad(double a, double b) const {
        if (a == b) return 0.0;
        return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f_, a, b, 10, 1e-13);
    }

    double prefix_forward(long long k) const {  // integral over [anchor, anchor + k*spacing]
        while (static_cast<long long>(forward_.size()) <= k) {
            long long j = static_cast<long long>(forward_.size()) - 1;
            forward_.push_back(forward_.back() +
                               quad(anchor_ + j * spacing_, anchor_ + (j + 1) * spacing_));
        }
        return forward_[static_cast<std::size_t>(std::max<long long>(k, 0))];
    }

    double prefix_backward(long long k) const {  // integral over [anchor + k*spacing, anchor], k<=0
        while (static_cast<long long>(backward_.size()) <= -k) {
            long long j = -(static_cast<long long>(backward_.size()) - 1);
            backward_.push_back(backward_.back() +
                                quad(anchor_ + (j - 1) * spacing_, anchor_ + j * spacing_));
        }
        return -backward_[static_cast<std::size_t>(-std::min<long long>(k, 0))];
    }

    std::function<double(double)> f_;
    double anchor_;
    double spacing_;
    mutable std::vector<double> forward_;
    mutable std::vector<double> backward_;
};

}  // namespace detail

// Bundles a frequency profile with Ermakov parameters and owns the per-context
// ODE and quadrature caches. Values are history-independent; the caches only
// memoize checkpoints.
class ClassicalContext {
  public:
    ClassicalContext(FrequencyProfile profile, ErmakovParams params)
        : profile_(std::move(profile)), params_(params) {
        validate(profile_);
        if (const auto* p = std::get_if<SechPulse>(&profile_)) {
            auto [q1, q1_dot] = sech_basis_closed_form(*p, p->t0);
            detail::CheckpointedOde<4>::State init{q1.real(), q1_dot.real(), q1.imag(),
                                                   q1_dot.imag()};
            FrequencyProfile local = profile_;
            ode4_ = std::make_unique<detail::CheckpointedOde<4>>(
                [local](const auto& s, auto& ds, double t) {
                    double w4 = 4.0 * omega2_at(local, t);
                    ds[0] = s[1];
                    ds[1] = -w4 * s[0];
                    ds[2] = s[3];
                    ds[3] = -w4 * s[2];
                },
                p->t0, init);
        } else if (std::holds_alternative<CustomProfile>(profile_)) {
            const auto& p = std::get<CustomProfile>(profile_);
            double w0 = wronskian_constant(profile_).real();
            detail::CheckpointedOde<6>::State init{1.0, 0.0, 0.0, w0, p.gamma0, p.gamma_dot0};
            FrequencyProfile local = profile_;
            ode6_ = std::make_unique<detail::CheckpointedOde<6>>(
                [local](const auto& s, auto& ds, double t) {
                    double w4 = 4.0 * omega2_at(local, t);
                    double f = force_at(local, t);
                    ds[0] = s[1];
                    ds[1] = -w4 * s[0];
                    ds[2] = s[3];
                    ds[3] = -w4 * s[2];
                    ds[4] = s[5];
                    ds[5] = -w4 * s[4] + 2.0 * f;
                },
                0.0, init);
        }
        tau_ = std::make_unique<detail::CheckpointedIntegral>(
            [this](double u) { return 1.0 / sigma_squared(u); }, 0.0);
        if (!std::holds_alternative<SechPulse>(profile_)) {
            work_ = std::make_unique<detail::CheckpointedIntegral>(
                [this](double u) {
                    auto [g, gd] = gamma_pair(u);
                    (void)gd;
                    return force_at(profile_, u) * g;
                },
                0.0);
        }
    }

    // The cached integrands capture `this`; pin the object in place.
    ClassicalContext(const ClassicalContext&) = delete;
    ClassicalContext& operator=(const ClassicalContext&) = delete;

    const FrequencyProfile& profile() const { return profile_; }
    const ErmakovParams& params() const { return params_; }
    bool resonant_nonperiodic() const { return resonant_drive(profile_); }

    LinearBasis basis(double t) const {
        LinearBasis out;
        out.w0 = params_.w0;
        if (const auto* p = std::get_if<CosineDrive>(&profile_)) {
            double w = 2.0 * p->omega0;
            out.q1 = std::cos(w * t);
            out.q1_dot = -w * std::sin(w * t);
            out.q2 = std::sin(w * t);
            out.q2_dot = w * std::cos(w * t);
        } else if (std::holds_alternative<SechPulse>(profile_)) {
            auto s = ode4_->eval(t);
            out.q1 = {s[0], s[2]};
            out.q1_dot = {s[1], s[3]};
            out.q2 = std::conj(out.q1);
            out.q2_dot = std::conj(out.q1_dot);
        } else {
            auto s = ode6_->eval(t);
            out.q1 = s[0];
            out.q1_dot = s[1];
            out.q2 = s[2];
            out.q2_dot = s[3];
        }
        return out;
    }

    double sigma_squared(double t) const {
        auto [s, sd] = sigma_squared_pair(t);
        (void)sd;
        return s;
    }

    ClassicalState state(double t) const {
        auto [s2, s2_dot] = sigma_squared_pair(t);
        auto [g, gd] = gamma_pair(t);
        ClassicalState out;
        out.t = t;
        out.sigma = std::sqrt(s2);
        out.sigma_dot = 0.5 * s2_dot / out.sigma;
        out.gamma = g;
        out.gamma_dot = gd;
        out.W = out.sigma * gd - out.sigma_dot * g;
        out.tau = phase_time(t);
        return out;
    }

    double phase_time(double t) const { return tau_->eval(t); }

    // Integral of F(t') gamma(t') from 0 to t, the drive contribution to the
    // phase of exact solutions.
    double force_path_integral(double t) const {
        if (!work_) return 0.0;  // sech profile carries no drive
        return work_->eval(t);
    }

  private:
    std::pair<double, double> sigma_squared_pair(double t) const {
        double s2 = 0.0, s2_dot = 0.0;
        const double a = params_.a, b = params_.b, c = params_.c;
        if (const auto* p = std::get_if<CosineDrive>(&profile_)) {
            double w = 4.0 * p->omega0;
            s2 = 0.5 * (a + c) + 0.5 * (a - c) * std::cos(w * t) + 0.5 * b * std::sin(w * t);
            s2_dot = -0.5 * w * (a - c) * std::sin(w * t) + 0.5 * w * b * std::cos(w * t);
        } else if (std::holds_alternative<SechPulse>(profile_)) {
            auto s = ode4_->eval(t);
            double u = s[0], ud = s[1], v = s[2], vd = s[3];
            s2 = (b + 2.0 * a) * u * u + (b - 2.0 * a) * v * v;
            s2_dot = 2.0 * (b + 2.0 * a) * u * ud + 2.0 * (b - 2.0 * a) * v * vd;
        } else {
            auto s = ode6_->eval(t);
            double q1 = s[0], q1d = s[1], q2 = s[2], q2d = s[3];
            s2 = a * q1 * q1 + b * q1 * q2 + c * q2 * q2;
            s2_dot = 2.0 * a * q1 * q1d + b * (q1d * q2 + q1 * q2d) + 2.0 * c * q2 * q2d;
        }
        if (!(s2 > 0.0))
            throw InvariantViolation("sigma^2 must stay positive along the evaluation path");
        return {s2, s2_dot};
    }

    std::pair<double, double> gamma_pair(double t) const {
        if (const auto* p = std::get_if<CosineDrive>(&profile_)) {
            double w = 2.0 * p->omega0;
            double g = p->A * std::cos(w * t + p->phi);
            double gd = -w * p->A * std::sin(w * t + p->phi);
            if (p->F0 != 0.0) {
                if (resonant_drive(*p)) {
                    double amp = p->F0 / w;
                    g += amp * t * std::sin(w * t);
                    gd += amp * (std::sin(w * t) + w * t * std::cos(w * t));
                } else {
                    double denom = w * w - p->alpha * p->alpha;
                    g += 2.0 * p->F0 * std::cos(p->alpha * t) / denom;
                    gd += -2.0 * p->F0 * p->alpha * std::sin(p->alpha * t) / denom;
                }
            }
            return {g, gd};
        }
        if (const auto* p = std::get_if<SechPulse>(&profile_)) {
            auto s = ode4_->eval(t);
            return {p->g1 * s[0] + p->g2 * s[2], p->g1 * s[1] + p->g2 * s[3]};
        }
        auto s = ode6_->eval(t);
        return {s[4], s[5]};
    }

    FrequencyProfile profile_;
    ErmakovParams params_;
    std::unique_ptr<detail::CheckpointedOde<4>> ode4_;
    std::unique_ptr<detail::CheckpointedOde<6>> ode6_;
    std::unique_ptr<detail::CheckpointedIntegral> tau_;
    std::unique_ptr<detail::CheckpointedIntegral> work_;
};

inline LinearBasis linear_basis(const FrequencyProfile& profile, double t) {
    ErmakovParams params = ErmakovParams::make(profile, 1.0, 1.0);
    return ClassicalContext(profile, params).basis(t);
}

inline ClassicalState classical_state(const FrequencyProfile& profile,
                                      const ErmakovParams& params, double t) {
    return ClassicalContext(profile, params).state(t);
}

inline double phase_time(const FrequencyProfile& profile, const ErmakovParams& params, double t) {
    return ClassicalContext(profile, params).phase_time(t);
}

// Closed form tau = (1/2) arctan[(w0/4)(b + 2c q2/q1)], unwrapped by marching
// from 0 and absorbing the pi/2 branch jumps where q1 vanishes. Cross-check
// for the quadrature path; the real part carries the phase for the complex
// sech basis.
inline double phase_time_arctan(const ClassicalContext& ctx, double t, int samples = 4000) {
    const auto& params = ctx.params();
    auto raw = [&](double u) {
        LinearBasis lb = ctx.basis(u);
        std::complex<double> arg =
            0.25 * params.w0 * (params.b + 2.0 * params.c * lb.q2 / lb.q1);
        return 0.5 * std::real(std::atan(arg));
    };
    double offset = 0.0;
    double prev = raw(0.0);
    double first = prev;
    double value = prev;
    for (int i = 1; i <= samples; ++i) {
        double u = t * double(i) / double(samples);
        double cur = raw(u);
        offset += 0.5 * M_PI * std::round((prev - cur) / (0.5 * M_PI));
        value = cur + offset;
        prev = cur;
    }
    return value - first;
}

}  // namespace parosc
