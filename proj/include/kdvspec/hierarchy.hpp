#pragma once

// Stationary KdV hierarchy over the differential ring: the coefficients f_l,
// the spectral polynomials F_n and H_{n+1}, the stationary KdV expressions,
// and the algebraic identities tying them to the hyperelliptic curve.

#include "kdvspec/diffpoly.hpp"

namespace kdvspec {

// f_{l} from f_{l-1}; introduces the fresh constant c_level.
DiffPoly next_f(const DiffPoly& prev, int level);

// f_0 .. f_lmax.
std::vector<DiffPoly> f_sequence(int lmax);

// Homogeneous coefficient: f_l with all integration constants zeroed.
DiffPoly homogeneous_f(int l);

// n-th stationary KdV expression, -2 d/dx f_{n+1}.
DiffPoly skdv(int n);

DiffPoly build_F(int n);
DiffPoly build_H(int n);

// Rewrites V-derivatives of order >= 2n+1 using the n-th stationary equation
// and its x-derivatives. The identities of the hierarchy hold only modulo
// this ideal.
class StationaryIdeal {
public:
    explicit StationaryIdeal(int n);
    DiffPoly reduce(const DiffPoly& p) const;
    int order() const { return n_; }

private:
    const DiffPoly& replacement(int j) const;
    int n_;
    mutable std::vector<DiffPoly> repl_;  // repl_[j] valid for j >= 2n+1, grown on demand
};

struct IdentityReport {
    bool recursion_ok = false;       // F_xxx - 4(V-z)F_x - 2V_x F == 0 mod ideal
    bool first_integral_ok = false;  // d/dx of the curve combination == 0 mod ideal
    bool factorization_ok = false;   // R + F_x^2/4 == F*H exactly
    DiffPoly residual;               // first nonzero residual when a check fails
    DiffPoly curve_poly;             // (1/2)F_xx F - (1/4)F_x^2 - (V-z)F^2, reduced
    bool ok() const { return recursion_ok && first_integral_ok && factorization_ok; }
};

IdentityReport verify_core_identities(int n);

// c_k as a symmetric function of the 2n+1 branch points, by direct evaluation
// of the closed-form multinomial sum.
mpq_class c_from_E_exact(std::span<const mpq_class> E, int k);
cplx c_from_E(std::span<const cplx> E, int k);

// c_1..c_n extracted from the top z-coefficients of the reduced curve
// combination matched against prod (z - E_m); exact, valid for n <= 2.
std::vector<DiffPoly> c_matching_polynomials(int n);

}  // namespace kdvspec
