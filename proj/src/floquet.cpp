#include "kdvspec/floquet.hpp"

#include "kdvspec/hierarchy.hpp"
#include "kdvspec/spectrum.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace kdvspec {

namespace {

using State = std::array<cplx, 4>;  // (c, c_x, s, s_x)

State axpy(const State& y, double h, const State& k) {
    State r;
    for (int i = 0; i < 4; ++i) r[i] = y[i] + h * k[i];
    return r;
}

// Dormand-Prince 5(4) pair on psi'' = (V - z) psi for the (c, s) columns.
State integrate_ode(const std::function<cplx(double)>& V, cplx z, double a, double b,
                    State y, double tol) {
    auto rhs = [&](double x, const State& y0) {
        cplx q = V(x) - z;
        return State{y0[1], q * y0[0], y0[3], q * y0[2]};
    };
    const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    // Per-step control sits well below the requested accuracy so the
    // accumulated error (Wronskian drift in particular) stays within it.
    tol = std::max(tol / 64.0, 1e-15);
    double x = a;
    double h = (b - a) / 64.0;
    const double hmin = (b - a) * 1e-14;
    int iter = 0;
    while (x < b) {
        if (++iter > 1000000) throw std::runtime_error("ODE integration stalled");
        if (x + h > b) h = b - x;
        State k1 = rhs(x, y);
        State k2 = rhs(x + c2 * h, axpy(y, h / 5.0, k1));
        State y3;
        for (int i = 0; i < 4; ++i) y3[i] = y[i] + h * (3.0 / 40 * k1[i] + 9.0 / 40 * k2[i]);
        State k3 = rhs(x + c3 * h, y3);
        State y4;
        for (int i = 0; i < 4; ++i)
            y4[i] = y[i] + h * (44.0 / 45 * k1[i] - 56.0 / 15 * k2[i] + 32.0 / 9 * k3[i]);
        State k4 = rhs(x + c4 * h, y4);
        State y5;
        for (int i = 0; i < 4; ++i)
            y5[i] = y[i] + h * (19372.0 / 6561 * k1[i] - 25360.0 / 2187 * k2[i] +
                                64448.0 / 6561 * k3[i] - 212.0 / 729 * k4[i]);
        State k5 = rhs(x + c5 * h, y5);
        State y6;
        for (int i = 0; i < 4; ++i)
            y6[i] = y[i] + h * (9017.0 / 3168 * k1[i] - 355.0 / 33 * k2[i] +
                                46732.0 / 5247 * k3[i] + 49.0 / 176 * k4[i] -
                                5103.0 / 18656 * k5[i]);
        State k6 = rhs(x + h, y6);
        State ynew;
        for (int i = 0; i < 4; ++i)
            ynew[i] = y[i] + h * (35.0 / 384 * k1[i] + 500.0 / 1113 * k3[i] +
                                  125.0 / 192 * k4[i] - 2187.0 / 6784 * k5[i] +
                                  11.0 / 84 * k6[i]);
        State k7 = rhs(x + h, ynew);
        State y4th;
        for (int i = 0; i < 4; ++i)
            y4th[i] = y[i] + h * (5179.0 / 57600 * k1[i] + 7571.0 / 16695 * k3[i] +
                                  393.0 / 640 * k4[i] - 92097.0 / 339200 * k5[i] +
                                  187.0 / 2100 * k6[i] + 1.0 / 40 * k7[i]);
        double err = 0.0;
        for (int i = 0; i < 4; ++i) {
            double sc = tol + tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            double e = std::abs(ynew[i] - y4th[i]) / sc;
            err = std::max(err, e);
        }
        if (err <= 1.0) {
            x += h;
            y = ynew;
        }
        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(fac, 0.2, 5.0);
        if (h < hmin) throw std::runtime_error("ODE step-size underflow");
    }
    return y;
}

}  // namespace

PeriodicPotential PeriodicPotential::create(double period, std::function<cplx(double)> V,
                                            double x0) {
    if (!(period > 0.0)) throw std::invalid_argument("period must be positive");
    PeriodicPotential p;
    p.period = period;
    p.V = std::move(V);
    p.x0 = x0;
    for (double t : {0.0, 0.23, 0.71}) {
        cplx a = p.V(x0 + t * period), b = p.V(x0 + t * period + period);
        if (std::abs(a - b) > 1e-10 * (1.0 + std::abs(a)))
            throw std::invalid_argument("potential is not periodic with the stated period");
    }
    return p;
}

MonodromyMatrix monodromy(const PeriodicPotential& p, cplx z, double tol) {
    State y{1.0, 0.0, 0.0, 1.0};
    State r = integrate_ode(p.V, z, p.x0, p.x0 + p.period, y, tol);
    return {r[0], r[2], r[1], r[3]};
}

cplx discriminant(const PeriodicPotential& p, cplx z, double tol) {
    return monodromy(p, z, tol).trace_half();
}

std::array<cplx, 2> s_column(const PeriodicPotential& p, cplx z, double from, double tol) {
    State y{1.0, 0.0, 0.0, 1.0};
    State r = integrate_ode(p.V, z, from, from + p.period, y, tol);
    return {r[2], r[3]};
}

cplx floquet_radical(cplx delta) {
    cplx r = std::sqrt(delta * delta - 1.0);
    if (std::abs(delta + r) < 1.0) r = -r;
    return r;
}

namespace {

struct GridPoint {
    cplx z;
    cplx delta;
};

// Marching squares on Im Delta with the |Re Delta| <= 1 filter; one level of
// sub-cell refinement on active cells.
void extract_cell(const GridPoint& p00, const GridPoint& p10, const GridPoint& p11,
                  const GridPoint& p01, std::vector<std::pair<cplx, cplx>>* segs) {
    const GridPoint* corner[4] = {&p00, &p10, &p11, &p01};
    int mask = 0;
    for (int i = 0; i < 4; ++i)
        if (corner[i]->delta.imag() > 0.0) mask |= 1 << i;
    if (mask == 0 || mask == 15) return;
    auto interp = [&](const GridPoint* a, const GridPoint* b) {
        double fa = a->delta.imag(), fb = b->delta.imag();
        double t = fa / (fa - fb);
        cplx z = a->z + t * (b->z - a->z);
        cplx d = a->delta + t * (b->delta - a->delta);
        return GridPoint{z, d};
    };
    // Edge order: bottom, right, top, left.
    std::array<GridPoint, 4> pt;
    std::array<bool, 4> has{};
    const GridPoint* e[4][2] = {{&p00, &p10}, {&p10, &p11}, {&p11, &p01}, {&p01, &p00}};
    for (int i = 0; i < 4; ++i) {
        double fa = e[i][0]->delta.imag(), fb = e[i][1]->delta.imag();
        if ((fa > 0.0) != (fb > 0.0)) {
            pt[i] = interp(e[i][0], e[i][1]);
            has[i] = true;
        }
    }
    std::vector<int> hit;
    for (int i = 0; i < 4; ++i)
        if (has[i]) hit.push_back(i);
    auto emit = [&](const GridPoint& a, const GridPoint& b) {
        // Keep the segment only where the real part stays within the band.
        if (std::abs(a.delta.real()) <= 1.0 + 1e-12 &&
            std::abs(b.delta.real()) <= 1.0 + 1e-12)
            segs->emplace_back(a.z, b.z);
    };
    if (hit.size() == 2) {
        emit(pt[hit[0]], pt[hit[1]]);
    } else if (hit.size() == 4) {
        // Saddle: split by the mean value.
        cplx mid = 0.25 * (p00.delta + p10.delta + p11.delta + p01.delta);
        if ((mid.imag() > 0.0) == (p00.delta.imag() > 0.0)) {
            emit(pt[0], pt[1]);
            emit(pt[2], pt[3]);
        } else {
            emit(pt[3], pt[0]);
            emit(pt[1], pt[2]);
        }
    }
}

}  // namespace

ScanResult spectrum_scan(const PeriodicPotential& p, cplx window_lo, cplx window_hi,
                         int nx, int ny, double ode_tol) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("grid must be at least 2x2");
    ScanResult out;
    out.nx = nx;
    out.ny = ny;
    double x0 = window_lo.real(), x1 = window_hi.real();
    double y0 = window_lo.imag(), y1 = window_hi.imag();
    auto zat = [&](int i, int j) {
        return cplx(x0 + (x1 - x0) * i / (nx - 1), y0 + (y1 - y0) * j / (ny - 1));
    };
    std::vector<GridPoint> grid(static_cast<size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            cplx z = zat(i, j);
            grid[j * nx + i] = {z, discriminant(p, z, ode_tol)};
        }

    std::vector<std::pair<cplx, cplx>> segs;
    auto active = [&](const GridPoint& a, const GridPoint& b, const GridPoint& c2,
                      const GridPoint& d) {
        bool sign_change = false;
        const GridPoint* q[4] = {&a, &b, &c2, &d};
        for (int i = 0; i < 4; ++i)
            if ((q[i]->delta.imag() > 0.0) != (q[(i + 1) % 4]->delta.imag() > 0.0))
                sign_change = true;
        bool near_band = false;
        for (int i = 0; i < 4; ++i)
            if (std::abs(q[i]->delta.real()) <= 1.5) near_band = true;
        return sign_change && near_band;
    };
    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            const GridPoint& p00 = grid[j * nx + i];
            const GridPoint& p10 = grid[j * nx + i + 1];
            const GridPoint& p11 = grid[(j + 1) * nx + i + 1];
            const GridPoint& p01 = grid[(j + 1) * nx + i];
            if (!active(p00, p10, p11, p01)) continue;
            // One level of refinement: evaluate center and edge midpoints.
            GridPoint mb{0.5 * (p00.z + p10.z), discriminant(p, 0.5 * (p00.z + p10.z), ode_tol)};
            GridPoint mr{0.5 * (p10.z + p11.z), discriminant(p, 0.5 * (p10.z + p11.z), ode_tol)};
            GridPoint mt{0.5 * (p11.z + p01.z), discriminant(p, 0.5 * (p11.z + p01.z), ode_tol)};
            GridPoint ml{0.5 * (p01.z + p00.z), discriminant(p, 0.5 * (p01.z + p00.z), ode_tol)};
            GridPoint mc{0.25 * (p00.z + p10.z + p11.z + p01.z),
                         discriminant(p, 0.25 * (p00.z + p10.z + p11.z + p01.z), ode_tol)};
            extract_cell(p00, mb, mc, ml, &segs);
            extract_cell(mb, p10, mr, mc, &segs);
            extract_cell(mc, mr, p11, mt, &segs);
            extract_cell(ml, mc, mt, p01, &segs);
        }
    }

    // Chain segments into polylines by endpoint proximity.
    double snap = 1e-9 * (std::abs(window_hi - window_lo) + 1.0);
    std::vector<char> used(segs.size(), 0);
    for (size_t i = 0; i < segs.size(); ++i) {
        if (used[i]) continue;
        used[i] = 1;
        std::vector<cplx> line = {segs[i].first, segs[i].second};
        bool grew = true;
        while (grew) {
            grew = false;
            for (size_t k = 0; k < segs.size(); ++k) {
                if (used[k]) continue;
                if (std::abs(segs[k].first - line.back()) < snap) {
                    line.push_back(segs[k].second);
                    used[k] = 1;
                    grew = true;
                } else if (std::abs(segs[k].second - line.back()) < snap) {
                    line.push_back(segs[k].first);
                    used[k] = 1;
                    grew = true;
                } else if (std::abs(segs[k].first - line.front()) < snap) {
                    line.insert(line.begin(), segs[k].second);
                    used[k] = 1;
                    grew = true;
                } else if (std::abs(segs[k].second - line.front()) < snap) {
                    line.insert(line.begin(), segs[k].first);
                    used[k] = 1;
                    grew = true;
                }
            }
        }
        out.polylines.push_back(std::move(line));
    }
    return out;
}

std::string scan_to_json(const ScanResult& r) {
    nlohmann::ordered_json j;
    j["arcs"] = nlohmann::ordered_json::array();
    for (size_t i = 0; i < r.polylines.size(); ++i) {
        nlohmann::ordered_json a;
        a["id"] = i;
        a["arc_kind"] = "floquet-scan";
        nlohmann::ordered_json verts = nlohmann::ordered_json::array();
        for (cplx z : r.polylines[i])
            verts.push_back(nlohmann::ordered_json::array({z.real(), z.imag()}));
        a["vertices"] = verts;
        j["arcs"].push_back(a);
    }
    j["grid"] = nlohmann::ordered_json::array({r.nx, r.ny});
    return j.dump(2);
}

std::string scan_to_csv(const ScanResult& r) {
    std::ostringstream os;
    os << "arc_id,re,im,residual\n";
    char buf[128];
    for (size_t i = 0; i < r.polylines.size(); ++i)
        for (cplx z : r.polylines[i]) {
            std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,\n", i, z.real(), z.imag());
            os << buf;
        }
    return os.str();
}

LinkReport check_green_discriminant_links(
    const PeriodicPotential& pp, const HyperellipticCurve& c, const PeriodData& pd,
    std::span<const cplx> z_spectrum, std::span<const cplx> z_offband,
    const std::function<NumericPotentialSample(double, int)>& sampler) {
    LinkReport rep;
    double omega = pp.period;

    // (ii) on the spectrum: ln|rho_+| + (Omega/2) Phi = 0.
    for (cplx z : z_spectrum) {
        cplx delta = discriminant(pp, z);
        double lhs = std::log(std::abs(delta + floquet_radical(delta)));
        double ph = phi(c, pd, z);
        rep.log_phi_residual = std::max(rep.log_phi_residual, std::abs(lhs + 0.5 * omega * ph));
    }

    // (i) off the bands: dDelta/dz = Omega sqrt(Delta^2-1) <g>, sheet sign free.
    for (cplx z : z_offband) {
        double h = 1e-6;
        cplx fd = (discriminant(pp, z + h) - discriminant(pp, z - h)) / (2.0 * h);
        cplx delta = discriminant(pp, z);
        cplx rhs = omega * floquet_radical(delta) * mean_g(c, pd, z);
        double res = std::min(std::abs(fd - rhs), std::abs(fd + rhs)) /
                     std::max(1e-30, std::abs(fd));
        rep.d_delta_residual = std::max(rep.d_delta_residual, res);
    }

    // (iii) g(z,x) from the monodromy column against i F_n/(2 sqrt_R).
    int n = c.genus();
    DiffPoly F = build_F(n);
    std::vector<cplx> E(c.branch_points());
    std::vector<cplx> cvals;
    for (int k = 1; k <= n; ++k) cvals.push_back(c_from_E(E, k));
    int sheet = 0;
    for (cplx z : z_offband) {
        cplx delta = discriminant(pp, z);
        cplx rad = floquet_radical(delta);
        for (double x : {0.0, 0.31, 0.77, 1.23, 1.81}) {
            auto sc = s_column(pp, z, pp.x0 + x);
            cplx lhs = -sc[0] / (2.0 * rad);
            auto smp = sampler(pp.x0 + x, std::max(2 * n - 2, 0));
            cplx Fv = F.evaluate(smp, z, cvals);
            cplx r = cplx(0.0, 1.0) * Fv / (2.0 * c.sqrt_R(z));
            if (sheet == 0) sheet = std::abs(lhs - r) <= std::abs(lhs + r) ? 1 : -1;
            double res = std::abs(lhs - static_cast<double>(sheet) * r);
            rep.green_residual = std::max(rep.green_residual, res);
        }
    }
    return rep;
}

}  // namespace kdvspec
