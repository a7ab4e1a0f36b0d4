#pragma once

// Independent Floquet oracle for periodic potentials: monodromy matrices by
// adaptive Runge-Kutta integration, the discriminant Delta(z), band scans via
// Delta in [-1,1], and the identities linking Delta to the mean Green's
// function of the algebro-geometric side.

#include "kdvspec/curve.hpp"

#include <functional>

namespace kdvspec {

struct PeriodicPotential {
    double period = 1.0;  // Omega > 0
    std::function<cplx(double)> V;
    double x0 = 0.0;

    static PeriodicPotential create(double period, std::function<cplx(double)> V,
                                    double x0 = 0.0);
};

struct MonodromyMatrix {
    cplx c, s, c_x, s_x;  // fundamental system at x0 + Omega
    cplx det() const { return c * s_x - s * c_x; }
    cplx trace_half() const { return 0.5 * (c + s_x); }
};

MonodromyMatrix monodromy(const PeriodicPotential& p, cplx z, double tol = 1e-10);
cplx discriminant(const PeriodicPotential& p, cplx z, double tol = 1e-10);

// Solution column (s, s_x) based at `from`, integrated over one period.
std::array<cplx, 2> s_column(const PeriodicPotential& p, cplx z, double from,
                             double tol = 1e-10);

// sqrt(Delta^2 - 1) with the branch making |Delta + sqrt(...)| >= 1.
cplx floquet_radical(cplx delta);

struct ScanResult {
    std::vector<std::vector<cplx>> polylines;  // {Im Delta = 0} with |Re Delta| <= 1
    int nx = 0, ny = 0;
};

ScanResult spectrum_scan(const PeriodicPotential& p, cplx window_lo, cplx window_hi,
                         int nx, int ny, double ode_tol = 1e-8);

std::string scan_to_json(const ScanResult& r);
std::string scan_to_csv(const ScanResult& r);

struct LinkReport {
    double d_delta_residual = 0.0;  // dDelta/dz = Omega sqrt(Delta^2-1) <g>, relative
    double log_phi_residual = 0.0;  // ln|Delta + sqrt(Delta^2-1)| = -(Omega/2) Phi
    double green_residual = 0.0;    // -s(z,x+Omega,x)/(2 sqrt(Delta^2-1)) = i F_n/(2 sqrt_R)
};

LinkReport check_green_discriminant_links(
    const PeriodicPotential& pp, const HyperellipticCurve& c, const PeriodData& pd,
    std::span<const cplx> z_spectrum, std::span<const cplx> z_offband,
    const std::function<NumericPotentialSample(double, int)>& sampler);

}  // namespace kdvspec
