#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "parosc/errors.hpp"

namespace parosc {

// Dense univariate polynomial with arbitrary-precision integer coefficients,
// stored in ascending degree. All arithmetic is exact.
class IntPolynomial {
  public:
    IntPolynomial() = default;

    IntPolynomial(std::initializer_list<long> coeffs) {
        for (long v : coeffs) c_.emplace_back(v);
        trim();
    }

    explicit IntPolynomial(std::vector<mpz_class> coeffs) : c_(std::move(coeffs)) { trim(); }

    static IntPolynomial constant(const mpz_class& v) {
        IntPolynomial p;
        if (v != 0) p.c_ = {v};
        return p;
    }

    static IntPolynomial monomial(std::size_t degree, const mpz_class& coeff = 1) {
        IntPolynomial p;
        if (coeff != 0) {
            p.c_.assign(degree + 1, mpz_class(0));
            p.c_.back() = coeff;
        }
        return p;
    }

    bool is_zero() const { return c_.empty(); }

    // Degree of the zero polynomial is reported as -1.
    int degree() const { return static_cast<int>(c_.size()) - 1; }

    const mpz_class& coeff(std::size_t j) const {
        static const mpz_class zero(0);
        return j < c_.size() ? c_[j] : zero;
    }

    const std::vector<mpz_class>& coefficients() const { return c_; }

    const mpz_class& leading() const {
        if (c_.empty()) throw DomainError("leading coefficient of zero polynomial");
        return c_.back();
    }

    friend IntPolynomial operator+(const IntPolynomial& a, const IntPolynomial& b) {
        std::vector<mpz_class> r(std::max(a.c_.size(), b.c_.size()), mpz_class(0));
        for (std::size_t j = 0; j < a.c_.size(); ++j) r[j] += a.c_[j];
        for (std::size_t j = 0; j < b.c_.size(); ++j) r[j] += b.c_[j];
        return IntPolynomial(std::move(r));
    }

    friend IntPolynomial operator-(const IntPolynomial& a, const IntPolynomial& b) {
        std::vector<mpz_class> r(std::max(a.c_.size(), b.c_.size()), mpz_class(0));
        for (std::size_t j = 0; j < a.c_.size(); ++j) r[j] += a.c_[j];
        for (std::size_t j = 0; j < b.c_.size(); ++j) r[j] -= b.c_[j];
        return IntPolynomial(std::move(r));
    }

    friend IntPolynomial operator-(const IntPolynomial& a) {
        std::vector<mpz_class> r = a.c_;
        for (auto& v : r) v = -v;
        return IntPolynomial(std::move(r));
    }

    friend IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<mpz_class> r(a.c_.size() + b.c_.size() - 1, mpz_class(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return IntPolynomial(std::move(r));
    }

    friend IntPolynomial operator*(const mpz_class& s, const IntPolynomial& a) {
        if (s == 0) return {};
        std::vector<mpz_class> r = a.c_;
        for (auto& v : r) v *= s;
        return IntPolynomial(std::move(r));
    }

    friend bool operator==(const IntPolynomial& a, const IntPolynomial& b) { return a.c_ == b.c_; }

    IntPolynomial derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<mpz_class> r(c_.size() - 1);
        for (std::size_t j = 1; j < c_.size(); ++j) r[j - 1] = mpz_class(j) * c_[j];
        return IntPolynomial(std::move(r));
    }

    // Exact division; throws InvariantViolation if the remainder is nonzero.
    IntPolynomial divide_exact(const IntPolynomial& d) const {
        if (d.is_zero()) throw DomainError("division by zero polynomial");
        if (is_zero()) return {};
        if (degree() < d.degree())
            throw InvariantViolation("exact polynomial division: degree too small");
        std::vector<mpz_class> rem = c_;
        std::vector<mpz_class> quo(c_.size() - d.c_.size() + 1, mpz_class(0));
        for (int j = static_cast<int>(quo.size()) - 1; j >= 0; --j) {
            mpz_class& top = rem[j + d.degree()];
            if (top == 0) continue;
            if (!mpz_divisible_p(top.get_mpz_t(), d.leading().get_mpz_t()))
                throw InvariantViolation("exact polynomial division: inexact leading term");
            mpz_class q = top / d.leading();
            quo[j] = q;
            for (std::size_t i = 0; i < d.c_.size(); ++i) rem[j + i] -= q * d.c_[i];
        }
        for (const auto& v : rem)
            if (v != 0) throw InvariantViolation("exact polynomial division: nonzero remainder");
        return IntPolynomial(std::move(quo));
    }

    // GCD of all coefficients (positive); content of the zero polynomial is 0.
    mpz_class content() const {
        mpz_class g(0);
        for (const auto& v : c_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
        return g;
    }

    // Horner evaluation; T is double or std::complex<double>.
    template <typename T>
    T eval(const T& x) const {
        T acc{};
        for (std::size_t j = c_.size(); j-- > 0;) acc = acc * x + T(c_[j].get_d());
        return acc;
    }

    mpq_class eval_exact(const mpq_class& x) const {
        mpq_class acc(0);
        for (std::size_t j = c_.size(); j-- > 0;) acc = acc * x + mpq_class(c_[j]);
        return acc;
    }

    std::string str() const {
        if (c_.empty()) return "0";
        std::string s;
        for (std::size_t j = c_.size(); j-- > 0;) {
            if (c_[j] == 0) continue;
            if (!s.empty()) s += (c_[j] > 0 ? " + " : " - ");
            else if (c_[j] < 0) s += "-";
            mpz_class a = abs(c_[j]);
            if (a != 1 || j == 0) s += a.get_str();
            if (j >= 1) s += "z";
            if (j >= 2) s += "^" + std::to_string(j);
        }
        return s.empty() ? "0" : s;
    }

  private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    std::vector<mpz_class> c_;
};

// Reduced ratio of integer polynomials with a rational prefactor:
//   value(z) = scale * num(z) / den(z),
// where num and den are primitive (coefficient gcd 1) with positive leading
// coefficients. Used for the rational parts of superpotentials and potential
// deformations, whose printed coefficients must be matched exactly.
struct RationalTerm {
    mpq_class scale{0};
    IntPolynomial num;
    IntPolynomial den = IntPolynomial::constant(1);

    static RationalTerm make(const IntPolynomial& num_raw, const IntPolynomial& den_raw,
                             const mpq_class& scale_raw = 1) {
        if (den_raw.is_zero()) throw DomainError("RationalTerm with zero denominator");
        RationalTerm r;
        if (num_raw.is_zero() || scale_raw == 0) return r;
        mpz_class cn = num_raw.content();
        mpz_class cd = den_raw.content();
        mpz_class sn = num_raw.leading() > 0 ? 1 : -1;
        mpz_class sd = den_raw.leading() > 0 ? 1 : -1;
        r.scale = scale_raw * mpq_class(sn * cn) / mpq_class(sd * cd);
        r.scale.canonicalize();
        mpz_class un = sn * cn, ud = sd * cd;
        std::vector<mpz_class> n(num_raw.coefficients()), d(den_raw.coefficients());
        for (auto& v : n) v /= un;
        for (auto& v : d) v /= ud;
        r.num = IntPolynomial(std::move(n));
        r.den = IntPolynomial(std::move(d));
        return r;
    }

    bool is_zero() const { return scale == 0 || num.is_zero(); }

    template <typename T>
    T eval(const T& z) const {
        if (is_zero()) return T{};
        return T(scale.get_d()) * num.eval(z) / den.eval(z);
    }

    mpq_class eval_exact(const mpq_class& z) const {
        if (is_zero()) return 0;
        mpq_class d = den.eval_exact(z);
        if (d == 0) throw DomainError("RationalTerm evaluated at a denominator root");
        return scale * num.eval_exact(z) / d;
    }

    // d/dz of scale*num/den as a reduced RationalTerm.
    RationalTerm derivative() const {
        if (is_zero()) return {};
        return make(num.derivative() * den - num * den.derivative(), den * den, scale);
    }

    friend RationalTerm operator+(const RationalTerm& a, const RationalTerm& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        // sa na/da + sb nb/db = [pa qb (na db) + pb qa (nb da)] / (qa qb da db)
        mpz_class pa = a.scale.get_num(), qa = a.scale.get_den();
        mpz_class pb = b.scale.get_num(), qb = b.scale.get_den();
        IntPolynomial num = (pa * qb) * (a.num * b.den) + (pb * qa) * (b.num * a.den);
        return make(num, a.den * b.den, mpq_class(1) / mpq_class(qa * qb));
    }

    friend RationalTerm operator-(const RationalTerm& a) {
        RationalTerm r = a;
        r.scale = -r.scale;
        return r;
    }

    friend RationalTerm operator-(const RationalTerm& a, const RationalTerm& b) { return a + (-b); }

    friend RationalTerm operator*(const RationalTerm& a, const RationalTerm& b) {
        if (a.is_zero() || b.is_zero()) return {};
        return make(a.num * b.num, a.den * b.den, a.scale * b.scale);
    }

    friend RationalTerm operator*(const mpq_class& s, const RationalTerm& a) {
        if (s == 0 || a.is_zero()) return {};
        RationalTerm r = a;
        r.scale *= s;
        r.scale.canonicalize();
        return r;
    }

    static RationalTerm from_polynomial(const IntPolynomial& p, const mpq_class& s = 1) {
        return make(p, IntPolynomial::constant(1), s);
    }

    static RationalTerm constant(const mpq_class& s) {
        return from_polynomial(IntPolynomial::constant(1), s);
    }
};

// Exact equality of the represented rational functions (cross-multiplied, so
// non-reduced representations still compare equal).
inline bool equivalent(const RationalTerm& a, const RationalTerm& b) {
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    mpz_class pa = a.scale.get_num(), qa = a.scale.get_den();
    mpz_class pb = b.scale.get_num(), qb = b.scale.get_den();
    return (pa * qb) * (a.num * b.den) == (pb * qa) * (b.num * a.den);
}

// (d^2/dz^2) ln P as a reduced RationalTerm: (P''P - P'^2)/P^2.
inline RationalTerm log_second_derivative(const IntPolynomial& p) {
    if (p.is_zero()) throw DomainError("log_second_derivative of zero polynomial");
    if (p.degree() == 0) return {};
    IntPolynomial dp = p.derivative();
    return RationalTerm::make(p.derivative().derivative() * p - dp * dp, p * p);
}

}  // namespace parosc
