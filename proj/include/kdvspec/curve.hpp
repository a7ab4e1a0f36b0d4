#pragma once

// The hyperelliptic curve y^2 = R(z) = prod (z - E_m): cut layout, the
// branch-tracked square root on the cut plane, cycle periods by contour
// quadrature, normalization roots, and the homology-basis search for purely
// imaginary b-periods of the mean Green's differential.

#include "kdvspec/diffpoly.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kdvspec {

struct Cut {
    bool is_ray = false;
    int ia = -1, ib = -1;  // branch point indices (input order); ib < 0 for a ray
    cplx pa, pb;           // endpoints; for a ray, pb is a far point along the ray
    double ray_angle = 0.0;
};

struct CutPairingHint {
    std::vector<std::pair<int, int>> pairs;
    int ray_index = -1;
    std::optional<double> ray_angle;
};

struct CurveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PathError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class HyperellipticCurve {
public:
    static HyperellipticCurve create(std::vector<cplx> E,
                                     const std::optional<CutPairingHint>& hint = {});

    int genus() const { return (static_cast<int>(E_.size()) - 1) / 2; }
    const std::vector<cplx>& branch_points() const { return E_; }
    const std::vector<Cut>& cuts() const { return cuts_; }  // pair cuts, then the ray
    double scale() const { return scale_; }
    cplx anchor_point() const { return anchor_ref_; }
    cplx anchor_value() const { return anchor_val_; }
    // Lexicographically smallest branch point; the antiderivative anchor.
    cplx base_branch_point() const;

    cplx R(cplx z) const;
    cplx sqrt_R(cplx z) const;
    // Boundary value on cut `cut_index` from side +1 (left of pa->pb / of the
    // outgoing ray direction) or -1.
    cplx sqrt_R_side(int cut_index, cplx z, int side) const;

    double distance_to_cuts(cplx z, int* which = nullptr) const;
    bool segment_clear(cplx z0, cplx z1, double margin,
                       std::span<const cplx> ignore_endpoints = {}) const;
    // Polyline from z0 to z1 staying `margin` clear of every cut (endpoints on
    // branch points are allowed). Throws PathError when no route is found.
    std::vector<cplx> plan_path(cplx z0, cplx z1, double margin) const;

    std::string to_json() const;
    static HyperellipticCurve from_json(const std::string& text);

private:
    std::vector<cplx> E_;
    std::vector<int> sorted_;  // indices in lexicographic (Re, Im) order
    std::vector<Cut> cuts_;
    double scale_ = 1.0;
    cplx anchor_ref_, anchor_val_;
    void build_cuts(const std::optional<CutPairingHint>& hint);
};

// Square root of R with branch continuity maintained across consecutive
// evaluations; walking across a cut continues analytically onto the other
// sheet.
class TrackedSqrt {
public:
    explicit TrackedSqrt(const HyperellipticCurve& c) : c_(&c) {}
    cplx eval(cplx z);
    void reset() { have_prev_ = false; }
    void seed(cplx z, cplx value);

private:
    const HyperellipticCurve* c_;
    cplx prev_{};
    bool have_prev_ = false;
};

struct PeriodData {
    int genus = 0;
    // Monomial periods over the current homology basis: \oint z^k dz / y for
    // k = 0..n over a-cycles (inter-cut connectors doubled across sheets) and
    // the canonical b-cycles (nested loops around the finite cuts).
    std::vector<std::vector<cplx>> a_mono, b_mono;
    std::vector<cplx> lambda;      // normalization roots, sorted by (Re, Im)
    std::vector<cplx> poly;        // monic polynomial: z^n + sum poly[k] z^k
    cplx mean_V{0.0, 0.0};         // sum E_m - 2 sum lambda_j
    std::vector<cplx> b_periods_gdz;
    double max_re_b = 0.0;
    bool basis_verified = false;
    std::vector<std::vector<int>> basis_transform;  // 2n x 2n integer symplectic
    double quad_error = 0.0;
    bool quad_converged = true;

    cplx mean_g_poly(cplx z) const;  // prod (z - lambda_j) via stored coefficients
};

// Builds the primitive cycle periods and solves the normalization for the
// monic degree-n polynomial with vanishing a-periods of dz/y moments.
PeriodData normalize_lambda(const HyperellipticCurve& c, double quad_tol = 1e-10);

// \oint_{a_j} P(z) dz / y over the default basis, 1-based j.
cplx a_period(const HyperellipticCurve& c, std::span<const cplx> poly_coeffs, int j,
              double quad_tol = 1e-10);

// Fills p.b_periods_gdz (periods of i*prod(z-lambda)/(2y) dz over the current
// b-cycles) and the verification flag.
std::vector<cplx> b_periods_of_mean_g(const HyperellipticCurve& c, PeriodData& p,
                                      double tol = 1e-6);

enum class BasisSearchOutcome { verified, not_found };

// Enumerates integer symplectic transforms (full Sp(2,Z) for genus one,
// per-handle SL(2,Z) blocks for higher genus) with entries bounded by `bound`,
// re-solves the normalization in each candidate basis, and keeps the basis
// minimizing max_j |Re(b-period of <g> dz)|.
BasisSearchOutcome symplectic_basis_search(const HyperellipticCurve& c, PeriodData& p,
                                           int bound = 3, double tol = 1e-6);

// Zeros of F_n(., x) with the numeric data of the sample and c_k = c_k(E).
std::vector<cplx> dirichlet_mu(const HyperellipticCurve& c,
                               const NumericPotentialSample& sample);

std::string period_data_to_json(const PeriodData& p);

}  // namespace kdvspec
