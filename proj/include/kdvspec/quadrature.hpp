#pragma once

// Adaptive Gauss-Kronrod (G7,K15) quadrature for complex-valued integrands
// over real parameter intervals.

#include "kdvspec/diffpoly.hpp"

#include <functional>

namespace kdvspec {

struct QuadratureResult {
    cplx value{0.0, 0.0};
    double error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

QuadratureResult integrate_adaptive(const std::function<cplx(double)>& f, double a,
                                    double b, double abs_tol, int max_intervals = 2000);

// Path integral of f along the straight segment z0 -> z1.
QuadratureResult integrate_segment(const std::function<cplx(cplx)>& f, cplx z0, cplx z1,
                                   double abs_tol);

// Path integral along z0 -> z1 where f has inverse-square-root singularities
// at the flagged endpoints; uses trigonometric endpoint substitutions.
QuadratureResult integrate_segment_endpoint_sqrt(const std::function<cplx(cplx)>& f,
                                                 cplx z0, cplx z1, bool sing0, bool sing1,
                                                 double abs_tol);

// Fixed 15-node Kronrod rule along a segment with nodes evaluated in path
// order, so branch-tracked integrands see spatially consecutive points.
cplx kronrod15_segment_ordered(const std::function<cplx(cplx)>& f, cplx z0, cplx z1,
                               double* err_est = nullptr);

}  // namespace kdvspec
