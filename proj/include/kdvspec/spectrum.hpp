#pragma once

// The spectral characterization: Phi(z) = Re<g(z,.)^{-1}> anchored at the
// base branch point, zero-level arc tracing by predictor-corrector, endpoint
// and crossing classification, and the Weyl/Riccati consistency checks.

#include "kdvspec/curve.hpp"

#include <functional>
#include <string>
#include <vector>

namespace kdvspec {

// <g(z,.)> = i prod(z - lambda_j) / (2 sqrt_R(z)).
cplx mean_g(const HyperellipticCurve& c, const PeriodData& p, cplx z);

// Full antiderivative -2 int_{E0}^{z} <g> dz' along a planned path in the cut
// plane; its real part is Phi. `side` picks the approach side when z lies on
// a cut. The imaginary part is reported relative to the planned path.
cplx w_complex(const HyperellipticCurve& c, const PeriodData& p, cplx z, int side = +1);
double phi(const HyperellipticCurve& c, const PeriodData& p, cplx z, int side = +1);

// Outgoing arc directions at branch point m (0-based index into the input
// branch points); 2 N0 + 1 angles in (-pi, pi].
struct BranchDirections {
    int N0 = 0;
    std::vector<double> angles;
};
BranchDirections branch_directions(const HyperellipticCurve& c, const PeriodData& p, int m);

struct Crossing {
    int lambda_index = -1;  // first member of the coincidence group
    cplx location;
    int multiplicity = 1;  // M0
    double phi_value = 0.0;
    std::vector<double> directions;  // 2 M0 + 2 angles
};
// Crossing candidates: lambda_j away from every branch point with |Phi| below
// the crossing tolerance.
std::vector<Crossing> find_crossings(const HyperellipticCurve& c, const PeriodData& p,
                                     double crossing_tol = 1e-6);

struct TraceOptions {
    double step_rel = 1e-3;        // base predictor step, relative to curve scale
    double rmax_factor = 50.0;     // R_max = factor * max |E_m|
    double trace_tol = 1e-8;       // |Phi| bound on accepted vertices
    double merge_radius_rel = 2e-3;  // capture radius at seeds, relative
    int max_steps = 400000;
};

enum class EndpointKind { branch_point, crossing, infinity_point };

struct ArcEndpoint {
    EndpointKind kind = EndpointKind::branch_point;
    int index = -1;          // branch-point or crossing index
    double angle = 0.0;      // outgoing direction measured at the seed
};

struct SpectralArc {
    std::vector<cplx> vertices;
    std::vector<double> residuals;
    ArcEndpoint start, end;
    bool semi_infinite = false;
};

struct EndpointReport {
    int branch_index = 0;
    int arc_count = 0;
    int N0 = 0;
    std::vector<double> predicted_angles;
    std::vector<double> measured_angles;
};

struct SpectrumResult {
    std::vector<SpectralArc> arcs;
    std::vector<Crossing> crossings;
    std::vector<EndpointReport> endpoint_report;
    double asymptote_level = 0.0;  // Im <V>
    bool basis_verified = false;
    std::vector<std::string> warnings;
    int semi_infinite_count() const;
};

SpectrumResult trace_arcs(const HyperellipticCurve& c, const PeriodData& p,
                          const TraceOptions& opt = {});

struct SemistripReport {
    double m1 = 0.0, m2 = 0.0, m3 = 0.0;  // inf Im V, sup Im V, inf Re V
    double worst_violation = 0.0;
    int vertices = 0;
    bool ok(double eps) const { return worst_violation <= eps; }
};
SemistripReport validate_semistrip(const SpectrumResult& r, std::span<const cplx> V_samples);

struct WeylReport {
    double riccati_residual = 0.0;
    double product_residual = 0.0;
    double sum_residual = 0.0;
};
// phi(P,x) = (i y + F_n,x/2) / F_n on sheet `sheet`; the Riccati residual
// |phi_x + phi^2 - V + z| uses a central finite difference of width h.
WeylReport weyl_phi_check(const HyperellipticCurve& c,
                          const std::function<NumericPotentialSample(double, int)>& sampler,
                          double x, cplx z, int sheet, double h = 1e-4);

// Self-intersection scan over the polyline with a uniform spatial grid.
bool arc_self_intersects(const SpectralArc& arc, double merge_radius);

// Serialization of the traced spectrum.
std::string spectrum_to_json(const SpectrumResult& r, double decimate_step = 0.0);
std::string spectrum_to_csv(const SpectrumResult& r, double decimate_step = 0.0);
std::string spectrum_to_svg(const SpectrumResult& r, const HyperellipticCurve& c,
                            const PeriodData& p, bool timestamp_comment = true,
                            double decimate_step = 0.0);

}  // namespace kdvspec
