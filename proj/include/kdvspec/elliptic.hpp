#pragma once

// Weierstrass elliptic functions built on Jacobi theta series, the Riemann
// theta function for small genus, and the genus-one elliptic potential
// scenarios used throughout the test matrix.

#include "kdvspec/diffpoly.hpp"

#include <array>
#include <optional>
#include <vector>

namespace kdvspec {

// theta(z | tau) = sum_n exp(2 pi i n z + pi i n^2 tau), Im(tau) > 0.
cplx theta_genus1(cplx z, cplx tau);
// Value together with d/dz and d^2/dz^2.
std::array<cplx, 3> theta_genus1_derivs(cplx z, cplx tau);

struct ThetaResult {
    cplx value;
    double error_estimate;  // modulus sum over the boundary shell of the box
};

// Genus-g theta as a truncated sum over the integer box max|n_i| <= radius.
ThetaResult riemann_theta(const std::vector<cplx>& z,
                          const std::vector<std::vector<cplx>>& tau, int radius);

struct LatticeParams {
    cplx omega1, omega3;  // fundamental half-periods
    cplx tau;             // omega3 / omega1, Im > 0
    cplx g2, g3;
    cplx e1, e2, e3;  // wp(omega1), wp(omega2), wp(omega3)
    cplx eta1, eta3;  // zeta(omega1), zeta(omega3)

    static LatticeParams create(cplx omega1, cplx omega3);
};

struct WeierstrassValues {
    cplx p, dp, zeta, sigma;
};

WeierstrassValues weierstrass(const LatticeParams& l, cplx u);
cplx wp(const LatticeParams& l, cplx u);
cplx wp_prime(const LatticeParams& l, cplx u);
cplx wzeta(const LatticeParams& l, cplx u);
cplx wsigma(const LatticeParams& l, cplx u);

// [wp, wp', wp'', ..., wp^(kmax)] via the differential equation chain.
std::vector<cplx> wp_derivatives(const LatticeParams& l, cplx u, int kmax);

// A point b in the fundamental cell with wp(b) = w. sheet_sign = -1 returns
// the involuted point (flips the sign of wp').
cplx wp_inverse(const LatticeParams& l, cplx w, int sheet_sign = 1);
// The preimage whose wp' is closest to the requested value.
cplx wp_inverse_matching(const LatticeParams& l, cplx w, cplx desired_dp);

enum class LameVariant { standard, conjugate_pair };

// Genus-one elliptic potential V(x) = 2 wp(x + shift). The standard variant
// uses shift = omega3; the conjugate-pair variant uses conjugate half-periods
// with a real period and a strip-interior shift.
struct LameScenario {
    LatticeParams lattice;
    LameVariant variant;
    cplx shift;
    std::array<cplx, 3> E;  // (-e1, -e2, -e3)
    double period;          // real period of V (2*omega1 or 2*(omega1+omega3))
    cplx lambda1_expected;
    cplx mean_V_expected;

    cplx V(double x) const;
    NumericPotentialSample sample(double x, int kmax) const;
};

LameScenario lame_scenario(cplx omega1, cplx omega3,
                           LameVariant variant = LameVariant::standard,
                           std::optional<cplx> shift = std::nullopt);

struct CheckReport {
    double max_residual = 0.0;
    int samples = 0;
    bool ok(double tol) const { return samples > 0 && max_residual <= tol; }
};

// 2 wp(x + omega3) against the theta-quotient form of the potential.
CheckReport its_matveev_genus1_check(const LameScenario& s, std::span<const double> xs);

// Roots of H_2(., x) against their closed forms.
CheckReport neumann_nu_check(const LameScenario& s, std::span<const double> xs);

}  // namespace kdvspec
