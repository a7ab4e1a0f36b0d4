#pragma once

// Differential polynomials in a potential V(x): exact-rational polynomials in
// V and its x-derivatives, the spectral variable z, and the integration
// constants c1, c2, ... that arise when integrating the hierarchy recursion.

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kdvspec {

using cplx = std::complex<double>;

// Monomial key. v[k] is the exponent of the k-th x-derivative of V (v[0] is
// V itself), z is the power of the spectral variable, c[k] is the exponent of
// the constant c_{k+1}. Trailing zeros are trimmed so equality is structural.
struct Monomial {
    std::vector<uint8_t> v;
    uint32_t z = 0;
    std::vector<uint8_t> c;

    void normalize();
    int max_v_order() const;  // -1 if no V factor
    friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric evaluation bridge: x together with V(x), V'(x), ..., V^(K)(x).
struct NumericPotentialSample {
    double x = 0.0;
    std::vector<cplx> v;  // v[k] = V^(k)(x)
};

class DiffPoly {
public:
    using Coeff = mpq_class;
    using TermMap = std::map<Monomial, Coeff>;

    DiffPoly() = default;

    static DiffPoly constant(const Coeff& q);
    static DiffPoly V(int order = 0);
    static DiffPoly z();
    static DiffPoly c(int k);  // c_k, k >= 1

    bool is_zero() const { return terms_.empty(); }
    const TermMap& terms() const { return terms_; }

    DiffPoly& operator+=(const DiffPoly& o);
    DiffPoly& operator-=(const DiffPoly& o);
    friend DiffPoly operator+(DiffPoly a, const DiffPoly& b) { return a += b; }
    friend DiffPoly operator-(DiffPoly a, const DiffPoly& b) { return a -= b; }
    friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b);
    friend DiffPoly operator*(const Coeff& q, const DiffPoly& p);
    friend bool operator==(const DiffPoly& a, const DiffPoly& b) { return a.terms_ == b.terms_; }

    // d/dx in the free differential ring.
    DiffPoly dx() const;

    // Exact antiderivative: returns Q with Q.dx() == *this.
    // Throws IntegrationError if *this is not an exact x-derivative.
    DiffPoly integrate_x() const;

    DiffPoly with_c_zeroed() const;                       // all c_k -> 0
    DiffPoly with_c_values(std::span<const Coeff>) const; // exact substitution
    DiffPoly with_V_zeroed() const;

    int max_v_order() const;  // highest derivative order present, -1 if none
    int z_degree() const;
    int max_c_index() const;  // highest k with c_k present, 0 if none

    // Coefficient of z^p as a differential polynomial.
    DiffPoly z_coefficient(uint32_t p) const;

    cplx evaluate(const NumericPotentialSample& s, cplx zval,
                  std::span<const cplx> cvals) const;

    std::string text() const;
    std::string latex() const;

    void add_term(const Monomial& m, const Coeff& q);

private:
    TermMap terms_;
};

}  // namespace kdvspec
