#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <string>

#include "parosc/errors.hpp"
#include "parosc/int_polynomial.hpp"

namespace parosc {

// Physicists' Hermite polynomial H_n(z) by the three-term recurrence
// H_{n+1} = 2z H_n - 2n H_{n-1}.
inline double hermite(int n, double z) {
    if (n < 0) throw DomainError("hermite: negative index");
    double h0 = 1.0;
    if (n == 0) return h0;
    double h1 = 2.0 * z;
    for (int j = 1; j < n; ++j) {
        double h2 = 2.0 * z * h1 - 2.0 * j * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

inline IntPolynomial hermite_poly(int n) {
    if (n < 0) throw DomainError("hermite_poly: negative index");
    IntPolynomial h0{1};
    if (n == 0) return h0;
    IntPolynomial z = IntPolynomial::monomial(1);
    IntPolynomial h1 = mpz_class(2) * z;
    for (int j = 1; j < n; ++j) {
        IntPolynomial h2 = mpz_class(2) * (z * h1) - mpz_class(2 * j) * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

// Pseudo-Hermite polynomial H_m(z) = (-i)^m H_m(iz). All coefficients are
// nonnegative; the recurrence picks up a sign flip on the lower term:
// H_{m+1} = 2z H_m + 2m H_{m-1}.
inline double pseudo_hermite(int m, double z) {
    if (m < 0) throw DomainError("pseudo_hermite: negative index");
    double h0 = 1.0;
    if (m == 0) return h0;
    double h1 = 2.0 * z;
    for (int j = 1; j < m; ++j) {
        double h2 = 2.0 * z * h1 + 2.0 * j * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

inline IntPolynomial pseudo_hermite_poly(int m) {
    if (m < 0) throw DomainError("pseudo_hermite_poly: negative index");
    IntPolynomial h0{1};
    if (m == 0) return h0;
    IntPolynomial z = IntPolynomial::monomial(1);
    IntPolynomial h1 = mpz_class(2) * z;
    for (int j = 1; j < m; ++j) {
        IntPolynomial h2 = mpz_class(2) * (z * h1) + mpz_class(2 * j) * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

// Parameter block for the hypergeometric evaluators. Numerator parameters may
// be complex; the denominator parameter must not be a non-positive integer.
struct HypergeometricParams {
    std::complex<double> a{0.0, 0.0};
    std::complex<double> b{0.0, 0.0};  // second numerator parameter (2F1 only)
    std::complex<double> c{1.0, 0.0};  // denominator parameter
    std::complex<double> x{0.0, 0.0};  // argument
};

namespace detail {

inline bool nonpositive_integer(std::complex<double> v) {
    return v.imag() == 0.0 && v.real() <= 0.0 && v.real() == std::floor(v.real());
}

constexpr int kSeriesCap = 10000;

}  // namespace detail

// Confluent hypergeometric 1F1(a; c; x) by power series. The series is entire
// in x; convergence is controlled by the term ratio with a hard term cap.
inline std::complex<double> kummer_1f1(const HypergeometricParams& p) {
    if (detail::nonpositive_integer(p.c))
        throw DomainError("kummer_1f1: denominator parameter is a non-positive integer");
    std::complex<double> term{1.0, 0.0};
    std::complex<double> sum = term;
    for (int j = 0; j < detail::kSeriesCap; ++j) {
        term *= (p.a + double(j)) / (p.c + double(j)) * p.x / double(j + 1);
        sum += term;
        if (std::abs(term) <= 1e-17 * (1.0 + std::abs(sum))) return sum;
    }
    throw NumericError("kummer_1f1: series did not converge within " +
                       std::to_string(detail::kSeriesCap) + " terms, |x|=" +
                       std::to_string(std::abs(p.x)));
}

inline std::complex<double> kummer_1f1(std::complex<double> a, std::complex<double> c,
                                       std::complex<double> x) {
    return kummer_1f1(HypergeometricParams{a, {}, c, x});
}

namespace detail {

inline std::complex<double> gauss_series(std::complex<double> a, std::complex<double> b,
                                         std::complex<double> c, std::complex<double> x) {
    std::complex<double> term{1.0, 0.0};
    std::complex<double> sum = term;
    for (int j = 0; j < kSeriesCap; ++j) {
        term *= (a + double(j)) * (b + double(j)) / (c + double(j)) * x / double(j + 1);
        sum += term;
        if (std::abs(term) <= 1e-17 * (1.0 + std::abs(sum))) return sum;
    }
    throw NumericError("gauss_2f1: series did not converge within " +
                       std::to_string(kSeriesCap) + " terms, |x|=" + std::to_string(std::abs(x)));
}

}  // namespace detail

// Gauss hypergeometric 2F1(a,b;c;x) for real argument |x| < 1, complex
// parameters. Direct series for x in [-1/2, 1); the Pfaff transformation
// 2F1(a,b;c;x) = (1-x)^{-a} 2F1(a, c-b; c; x/(x-1)) maps x < -1/2 into (0,1/3)
// and is applied there. Arguments with |x| >= 1 are out of scope (the
// classical ODE path covers them).
inline std::complex<double> gauss_2f1(const HypergeometricParams& p) {
    if (detail::nonpositive_integer(p.c))
        throw DomainError("gauss_2f1: denominator parameter is a non-positive integer");
    if (p.x.imag() != 0.0) throw DomainError("gauss_2f1: complex argument not supported");
    double x = p.x.real();
    if (std::abs(x) >= 1.0) throw DomainError("gauss_2f1: |argument| >= 1");
    if (x < -0.5) {
        std::complex<double> w = x / (x - 1.0);
        return std::pow(std::complex<double>(1.0 - x), -p.a) *
               detail::gauss_series(p.a, p.c - p.b, p.c, w);
    }
    return detail::gauss_series(p.a, p.b, p.c, x);
}

inline std::complex<double> gauss_2f1(std::complex<double> a, std::complex<double> b,
                                      std::complex<double> c, double x) {
    return gauss_2f1(HypergeometricParams{a, b, c, {x, 0.0}});
}

}  // namespace parosc
