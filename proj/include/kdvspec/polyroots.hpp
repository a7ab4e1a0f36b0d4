#pragma once

// Polynomial roots via companion-matrix eigenvalues, sorted by (Re, Im) for
// reproducibility.

#include "kdvspec/diffpoly.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

namespace kdvspec {

// coeffs[k] multiplies z^k; the leading coefficient must be nonzero.
inline std::vector<cplx> poly_roots(std::span<const cplx> coeffs) {
    int deg = static_cast<int>(coeffs.size()) - 1;
    while (deg > 0 && std::abs(coeffs[deg]) == 0.0) --deg;
    if (deg < 1) return {};
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -coeffs[i] / coeffs[deg];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("polynomial root solve failed");
    std::vector<cplx> roots(deg);
    for (int i = 0; i < deg; ++i) roots[i] = es.eigenvalues()[i];
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

}  // namespace kdvspec
