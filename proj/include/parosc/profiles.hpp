#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <variant>

#include "parosc/errors.hpp"

namespace parosc {

// Constant frequency Omega0 with drive F(t) = F0 cos(alpha t). The homogeneous
// part of the driven trajectory is gamma_h = A cos(2 Omega0 t + phi).
struct CosineDrive {
    double omega0 = 1.0;
    double F0 = 0.0;
    double alpha = 0.0;
    double A = 0.0;
    double phi = 0.0;
};

// Frequency pulse 4 Omega^2(t) = omega1 + omega2 sech^2 k(t - t0), no drive.
// The driven trajectory reduces to a homogeneous solution built from the
// complex basis: gamma = g1 Re q1 + g2 Im q1.
struct SechPulse {
    double omega1 = 2.0;
    double omega2 = 15.0;
    double k = 1.0;
    double t0 = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
};

// User-supplied smooth samples of Omega^2(t) and F(t). gamma integrates
// gamma'' + 4 Omega^2 gamma = 2 F from (gamma0, gamma_dot0) at t = 0.
struct CustomProfile {
    std::function<double(double)> omega2;
    std::function<double(double)> force;
    double gamma0 = 0.0;
    double gamma_dot0 = 0.0;
};

using FrequencyProfile = std::variant<CosineDrive, SechPulse, CustomProfile>;

inline void validate(const FrequencyProfile& profile) {
    if (const auto* p = std::get_if<CosineDrive>(&profile)) {
        if (!(p->omega0 > 0.0)) throw DomainError("cosine profile requires omega0 > 0");
        if (!(p->alpha >= 0.0)) throw DomainError("cosine profile requires alpha >= 0");
    } else if (const auto* p = std::get_if<SechPulse>(&profile)) {
        if (!(p->omega1 > 0.0 && p->omega2 > 0.0))
            throw DomainError("sech profile requires omega1, omega2 > 0");
        if (!(p->k > 0.0)) throw DomainError("sech profile requires pulse rate k > 0");
    } else {
        const auto& cp = std::get<CustomProfile>(profile);
        if (!cp.omega2) throw DomainError("custom profile requires an omega2 callable");
    }
}

// Omega^2(t) entering the potential Omega^2 x^2; the linear basis solves
// q'' + 4 Omega^2 q = 0.
inline double omega2_at(const FrequencyProfile& profile, double t) {
    if (const auto* p = std::get_if<CosineDrive>(&profile)) return p->omega0 * p->omega0;
    if (const auto* p = std::get_if<SechPulse>(&profile)) {
        double s = 1.0 / std::cosh(p->k * (t - p->t0));
        return 0.25 * (p->omega1 + p->omega2 * s * s);
    }
    const auto& p = std::get<CustomProfile>(profile);
    double w = p.omega2(t);
    if (!(w > 0.0)) throw DomainError("custom profile sampled non-positive Omega^2");
    return w;
}

inline double force_at(const FrequencyProfile& profile, double t) {
    if (const auto* p = std::get_if<CosineDrive>(&profile))
        return p->F0 * std::cos(p->alpha * t);
    if (std::holds_alternative<SechPulse>(profile)) return 0.0;
    const auto& p = std::get<CustomProfile>(profile);
    return p.force ? p.force(t) : 0.0;
}

// Wronskian q1 q2' - q1' q2 of the built-in basis pair; imaginary for the
// complex-conjugate sech pair.
inline std::complex<double> wronskian_constant(const FrequencyProfile& profile) {
    if (const auto* p = std::get_if<CosineDrive>(&profile)) return {2.0 * p->omega0, 0.0};
    if (const auto* p = std::get_if<SechPulse>(&profile))
        return {0.0, -2.0 * std::sqrt(p->omega1)};
    return {2.0 * std::sqrt(omega2_at(profile, 0.0)), 0.0};
}

// Drive at twice the natural frequency grows linearly and never recurs; the
// outputs carry a non-periodic tag in that case.
inline bool resonant_drive(const CosineDrive& p) {
    return p.F0 != 0.0 && std::abs(p.alpha - 2.0 * p.omega0) <= 1e-12 * (1.0 + 2.0 * p.omega0);
}

inline bool resonant_drive(const FrequencyProfile& profile) {
    const auto* p = std::get_if<CosineDrive>(&profile);
    return p && resonant_drive(*p);
}

inline std::pair<double, double> default_window(const FrequencyProfile& profile) {
    if (const auto* p = std::get_if<CosineDrive>(&profile))
        return {0.0, 2.0 * M_PI / p->omega0};
    if (const auto* p = std::get_if<SechPulse>(&profile))
        return {p->t0 - 8.0 / p->k, p->t0 + 8.0 / p->k};
    return {0.0, 2.0 * M_PI};
}

}  // namespace parosc
