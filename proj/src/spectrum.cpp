#include "kdvspec/spectrum.hpp"

#include "kdvspec/hierarchy.hpp"
#include "kdvspec/quadrature.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <map>
#include <sstream>

namespace kdvspec {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx kI{0.0, 1.0};

double wrap_angle(double a) {
    while (a > kPi) a -= 2.0 * kPi;
    while (a <= -kPi) a += 2.0 * kPi;
    return a;
}

}  // namespace

cplx mean_g(const HyperellipticCurve& c, const PeriodData& p, cplx z) {
    return kI * p.mean_g_poly(z) / (2.0 * c.sqrt_R(z));
}

namespace {

bool is_branch_point(const HyperellipticCurve& c, cplx z, int* which = nullptr) {
    const auto& E = c.branch_points();
    for (size_t m = 0; m < E.size(); ++m) {
        if (std::abs(z - E[m]) < 1e-9 * c.scale()) {
            if (which) *which = static_cast<int>(m);
            return true;
        }
    }
    return false;
}

cplx integrate_w_along(const HyperellipticCurve& c, const PeriodData& p,
                       const std::vector<cplx>& path, bool sing_first, bool sing_last,
                       double tol) {
    cplx acc = 0.0;
    auto f = [&](cplx z) { return mean_g(c, p, z); };
    for (size_t leg = 0; leg + 1 < path.size(); ++leg) {
        bool s0 = sing_first && leg == 0;
        bool s1 = sing_last && leg + 2 == path.size();
        acc += integrate_segment_endpoint_sqrt(f, path[leg], path[leg + 1], s0, s1, tol).value;
    }
    return -2.0 * acc;
}

}  // namespace

cplx w_complex(const HyperellipticCurve& c, const PeriodData& p, cplx z, int side) {
    cplx e0 = c.base_branch_point();
    if (std::abs(z - e0) < 1e-13 * c.scale()) return 0.0;
    double margin = 1e-3 * c.scale();
    double tol = 1e-11 * std::max(1.0, c.scale());
    int target_branch = -1;
    if (is_branch_point(c, z, &target_branch)) {
        auto path = c.plan_path(e0, z, margin);
        return integrate_w_along(c, p, path, true, true, tol);
    }
    int which = -1;
    double d = c.distance_to_cuts(z, &which);
    if (d < 1.5 * margin) {
        const Cut& cut = c.cuts()[which];
        cplx t = cut.is_ray ? std::exp(kI * cut.ray_angle)
                            : (cut.pb - cut.pa) / std::abs(cut.pb - cut.pa);
        cplx n = kI * t * static_cast<double>(side >= 0 ? 1 : -1);
        cplx w = z + (3.0 * margin) * n;
        auto path = c.plan_path(e0, w, margin);
        path.push_back(z);
        return integrate_w_along(c, p, path, true, false, tol);
    }
    auto path = c.plan_path(e0, z, margin);
    return integrate_w_along(c, p, path, true, false, tol);
}

double phi(const HyperellipticCurve& c, const PeriodData& p, cplx z, int side) {
    return w_complex(c, p, z, side).real();
}

BranchDirections branch_directions(const HyperellipticCurve& c, const PeriodData& p, int m) {
    const auto& E = c.branch_points();
    cplx em = E.at(m);
    double ctol = 1e-7 * c.scale();
    BranchDirections out;
    cplx rest = 1.0;
    for (cplx l : p.lambda) {
        if (std::abs(l - em) <= ctol)
            ++out.N0;
        else
            rest *= (em - l);
    }
    // Square-root prefactor: sqrt_R(z) ~ S sqrt(z - em); the modulus and
    // argument mod pi are exact, a probe just off the cuts resolves the sign.
    cplx prod = 1.0;
    for (cplx e : E)
        if (std::abs(e - em) > 1e-12 * c.scale()) prod *= (em - e);
    cplx S0 = std::sqrt(prod);
    double rho = 1e-5 * c.scale();
    cplx probe = em + rho;
    double bestd = -1.0;
    for (int k = 0; k < 32; ++k) {
        cplx cand = em + rho * std::exp(kI * (2.0 * kPi * k / 32.0));
        double d = c.distance_to_cuts(cand);
        if (d > bestd) {
            bestd = d;
            probe = cand;
        }
    }
    cplx S_est = c.sqrt_R(probe) / std::sqrt(probe - em);
    cplx S = (std::abs(S_est - S0) <= std::abs(S_est + S0)) ? S0 : -S0;
    cplx A = -kI * rest / S;
    double phi0 = std::arg(A);
    double denom = out.N0 + 0.5;
    for (int k = 0; k < 2 * out.N0 + 1; ++k)
        out.angles.push_back(wrap_angle((0.5 * kPi + k * kPi - phi0) / denom));
    std::sort(out.angles.begin(), out.angles.end());
    return out;
}

std::vector<Crossing> find_crossings(const HyperellipticCurve& c, const PeriodData& p,
                                     double crossing_tol) {
    std::vector<Crossing> out;
    double ctol = 1e-7 * c.scale();
    double wscale = std::max(1.0, std::sqrt(c.scale()));
    std::vector<char> used(p.lambda.size(), 0);
    for (size_t j = 0; j < p.lambda.size(); ++j) {
        if (used[j]) continue;
        cplx lj = p.lambda[j];
        bool at_branch = false;
        for (cplx e : c.branch_points())
            if (std::abs(lj - e) <= ctol) at_branch = true;
        std::vector<size_t> group = {j};
        for (size_t k = j + 1; k < p.lambda.size(); ++k)
            if (std::abs(p.lambda[k] - lj) <= ctol) group.push_back(k);
        for (size_t g : group) used[g] = 1;
        if (at_branch) continue;  // coinciding with a branch point is endpoint data
        Crossing cr;
        cr.lambda_index = static_cast<int>(j);
        cr.location = lj;
        cr.multiplicity = static_cast<int>(group.size());
        cr.phi_value = phi(c, p, lj);
        if (std::abs(cr.phi_value) > crossing_tol * wscale) continue;
        cplx rest = 1.0;
        for (size_t k = 0; k < p.lambda.size(); ++k) {
            bool ingroup = std::find(group.begin(), group.end(), k) != group.end();
            if (!ingroup) rest *= (lj - p.lambda[k]);
        }
        cplx c0 = -kI * rest / c.sqrt_R(lj);
        double a0 = std::arg(c0);
        int m0 = cr.multiplicity;
        for (int k = 0; k < 2 * m0 + 2; ++k)
            cr.directions.push_back(wrap_angle(((k + 0.5) * kPi - a0) / (m0 + 1)));
        std::sort(cr.directions.begin(), cr.directions.end());
        out.push_back(cr);
    }
    return out;
}

int SpectrumResult::semi_infinite_count() const {
    int n = 0;
    for (const auto& a : arcs) n += a.semi_infinite ? 1 : 0;
    return n;
}

namespace {

struct Seed {
    cplx z;
    EndpointKind kind;
    int index;
    std::vector<double> dirs;
    std::vector<char> consumed;
    cplx W;
    bool sqrt_singular;  // branch points carry the 1/sqrt endpoint
};

// Angle of approach extrapolated to the seed: linear fit of angle against
// distance over the nearest stored vertices.
double extrapolate_angle(const std::vector<cplx>& verts, cplx center, bool from_front,
                         double rmax) {
    std::vector<std::pair<double, double>> pts;  // (rho, angle)
    int n = static_cast<int>(verts.size());
    double ref = 0.0;
    bool have_ref = false;
    for (int i = 0; i < n; ++i) {
        int idx = from_front ? i : n - 1 - i;
        cplx d = verts[idx] - center;
        double rho = std::abs(d);
        if (rho < 1e-14) continue;
        double ang = std::arg(d);
        if (!have_ref) {
            ref = ang;
            have_ref = true;
        }
        ang = ref + wrap_angle(ang - ref);
        pts.emplace_back(rho, ang);
        if (rho > rmax || pts.size() >= 24) break;
    }
    if (pts.empty()) return 0.0;
    if (pts.size() == 1) return wrap_angle(pts[0].second);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double m = static_cast<double>(pts.size());
    double det = m * sxx - sx * sx;
    if (std::abs(det) < 1e-30) return wrap_angle(pts[0].second);
    double intercept = (sy * sxx - sx * sxy) / det;
    return wrap_angle(intercept);
}

class Tracer {
public:
    Tracer(const HyperellipticCurve& c, const PeriodData& p, const TraceOptions& opt)
        : c_(c), p_(p), opt_(opt), tracked_(c) {
        scale_ = c.scale();
        double emax = 0.0;
        for (cplx e : c.branch_points()) emax = std::max(emax, std::abs(e));
        rmax_ = opt.rmax_factor * std::max(emax, 1e-9);
        wscale_ = std::max(1.0, std::sqrt(rmax_));
    }

    double rmax() const { return rmax_; }
    double wscale() const { return wscale_; }

    cplx tracked_sqrt(cplx z) { return tracked_.eval(z); }

    cplx dW(cplx z) {  // -2 <g> with the tracked branch
        return -kI * p_.mean_g_poly(z) / tracked_sqrt(z);
    }

    // Increment of W along a short segment, nodes in path order.
    cplx increment(cplx z0, cplx z1) {
        return kronrod15_segment_ordered([&](cplx z) { return dW(z); }, z0, z1);
    }

    // Radial hop off a seed; regularizes the sqrt endpoint at branch seeds.
    cplx hop_increment(cplx from, cplx to, bool sqrt_singular) {
        if (!sqrt_singular) return increment(from, to);
        cplx d = to - from;
        cplx acc = 0.0;
        int panels = 4;
        tracked_.reset();
        for (int q = 0; q < panels; ++q) {
            double th0 = kPi * q / panels, th1 = kPi * (q + 1) / panels;
            acc += kronrod15_segment_ordered(
                [&](cplx th) {
                    double t = 0.5 * (1.0 - std::cos(th.real()));
                    double w = 0.5 * std::sin(th.real());
                    cplx z = from + t * d;
                    return -kI * p_.mean_g_poly(z) / tracked_sqrt(z) * d * w;
                },
                cplx(th0, 0.0), cplx(th1, 0.0));
        }
        return acc;
    }

    void seed_branch(cplx at_z) {
        tracked_.reset();
        tracked_.eval(at_z);
    }

private:
    const HyperellipticCurve& c_;
    const PeriodData& p_;
    TraceOptions opt_;
    TrackedSqrt tracked_;
    double scale_, rmax_, wscale_;
};

}  // namespace

SpectrumResult trace_arcs(const HyperellipticCurve& c, const PeriodData& p,
                          const TraceOptions& opt) {
    SpectrumResult result;
    result.basis_verified = p.basis_verified;
    result.asymptote_level = p.mean_V.imag();
    if (!p.basis_verified)
        result.warnings.push_back(
            "basis-unverified: b-periods of <g>dz have nonvanishing real parts; arcs are "
            "seed-relative level sets");
    const double scale = c.scale();
    const auto& E = c.branch_points();

    result.crossings = find_crossings(c, p);

    std::vector<Seed> seeds;
    for (size_t m = 0; m < E.size(); ++m) {
        Seed s;
        s.z = E[m];
        s.kind = EndpointKind::branch_point;
        s.index = static_cast<int>(m);
        auto bd = branch_directions(c, p, static_cast<int>(m));
        s.dirs = bd.angles;
        s.consumed.assign(s.dirs.size(), 0);
        s.W = w_complex(c, p, E[m]);
        s.sqrt_singular = true;
        seeds.push_back(std::move(s));
    }
    for (size_t q = 0; q < result.crossings.size(); ++q) {
        Seed s;
        s.z = result.crossings[q].location;
        s.kind = EndpointKind::crossing;
        s.index = static_cast<int>(q);
        s.dirs = result.crossings[q].directions;
        s.consumed.assign(s.dirs.size(), 0);
        s.W = w_complex(c, p, s.z);
        s.sqrt_singular = false;
        seeds.push_back(std::move(s));
    }

    Tracer tracer(c, p, opt);
    const double rcap = opt.merge_radius_rel * scale;
    const double r0 = 1e-4 * scale;
    const double hbase = opt.step_rel * scale;
    const double rmax = tracer.rmax();
    const double w_tol = opt.trace_tol;

    auto nearest_seed = [&](cplx z, double* dist) -> int {
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < seeds.size(); ++i) {
            double d = std::abs(z - seeds[i].z);
            if (d < bd) {
                bd = d;
                best = static_cast<int>(i);
            }
        }
        *dist = bd;
        return best;
    };

    for (size_t si = 0; si < seeds.size(); ++si) {
        for (size_t di = 0; di < seeds[si].dirs.size(); ++di) {
            if (seeds[si].consumed[di]) continue;
            seeds[si].consumed[di] = 1;
            Seed& birth = seeds[si];
            double dir = birth.dirs[di];

            SpectralArc arc;
            arc.start.kind = birth.kind;
            arc.start.index = birth.index;
            double level = birth.W.real();

            tracer.seed_branch(birth.z + r0 * std::exp(kI * dir));
            cplx z = birth.z + r0 * std::exp(kI * dir);
            cplx W = birth.W + tracer.hop_increment(birth.z, z, birth.sqrt_singular);
            if (std::abs(W.real() - level) > 64.0 * w_tol) {
                // Branch sign of the hop is only fixed up to the sheet; retry
                // with the opposite sign before giving up.
                cplx Walt = birth.W - (W - birth.W);
                if (std::abs(Walt.real() - level) < std::abs(W.real() - level)) W = Walt;
            }
            // Project the hop vertex onto the level set.
            for (int it = 0; it < 8; ++it) {
                double r = W.real() - level;
                if (std::abs(r) <= 0.25 * w_tol) break;
                cplx gg = tracer.dW(z);
                if (std::abs(gg) < 1e-300) break;
                cplx delta = -r * std::conj(gg) / std::norm(gg);
                double cap = 0.5 * r0;
                if (std::abs(delta) > cap) delta *= cap / std::abs(delta);
                W += tracer.increment(z, z + delta);
                z += delta;
            }
            cplx prev_dir = std::exp(kI * dir);
            arc.vertices.push_back(birth.z);
            arc.residuals.push_back(std::abs(birth.W.real() - level));
            arc.vertices.push_back(z);
            arc.residuals.push_back(std::abs(W.real() - level));

            bool closed = false;
            int steps = 0;
            std::string abort_reason;
            while (!closed) {
                if (++steps > opt.max_steps) {
                    abort_reason = "step budget exhausted";
                    break;
                }
                // Tangent with orientation continuity.
                cplx g = tracer.dW(z);
                if (std::abs(g) < 1e-300) {
                    abort_reason = "vanishing gradient";
                    break;
                }
                cplx t = kI / g;
                t /= std::abs(t);
                if ((t * std::conj(prev_dir)).real() < 0.0) t = -t;

                double dist_seed;
                int ns = nearest_seed(z, &dist_seed);
                double h = hbase * std::clamp(std::abs(z) / scale, 1.0, 20.0);
                h = std::min(h, std::max(0.3 * dist_seed, 1e-6 * scale));

                cplx z_new = z + h * t;
                cplx W_new = W + tracer.increment(z, z_new);
                bool ok = false;
                for (int rep = 0; rep < 3 && !ok; ++rep) {
                    for (int it = 0; it < 8; ++it) {
                        double r = W_new.real() - level;
                        if (std::abs(r) <= 0.25 * w_tol) break;
                        cplx gg = tracer.dW(z_new);
                        if (std::abs(gg) < 1e-300) break;
                        cplx delta = -r * std::conj(gg) / std::norm(gg);
                        double cap = 0.5 * h;
                        if (std::abs(delta) > cap) delta *= cap / std::abs(delta);
                        W_new += tracer.increment(z_new, z_new + delta);
                        z_new += delta;
                    }
                    ok = std::abs(W_new.real() - level) <= w_tol;
                    if (!ok) {
                        h *= 0.25;
                        if (h < 1e-9 * scale) break;
                        z_new = z + h * t;
                        W_new = W + tracer.increment(z, z_new);
                    }
                }
                if (!ok) {
                    char buf[96];
                    std::snprintf(buf, sizeof(buf), "step-size collapse near (%g, %g)",
                                  z_new.real(), z_new.imag());
                    abort_reason = buf;
                    break;
                }
                prev_dir = (z_new - z) / std::abs(z_new - z);
                z = z_new;
                W = W_new;
                arc.vertices.push_back(z);
                arc.residuals.push_back(std::abs(W.real() - level));

                if (std::abs(z) > rmax) {
                    arc.end.kind = EndpointKind::infinity_point;
                    arc.end.index = -1;
                    arc.semi_infinite = true;
                    closed = true;
                    break;
                }
                double dist;
                int target = nearest_seed(z, &dist);
                bool is_birth = target == static_cast<int>(si);
                double leave_guard = std::max(2.0 * rcap, 3.0 * r0);
                bool left_birth = std::abs(z - birth.z) > leave_guard || steps > 32;
                // Terminate only at seeds on the same level; otherwise the arc
                // merely passes close by (possible when the basis is
                // unverified and levels are seed-relative).
                bool level_match =
                    target >= 0 && std::abs(seeds[target].W.real() - level) <= 64.0 * w_tol;
                if (dist < rcap && level_match && (!is_birth || left_birth)) {
                    // An incident arc approaches along one of the target's
                    // outgoing directions; a passing arc does not and keeps
                    // marching.
                    Seed& tgt = seeds[target];
                    double ang_in = extrapolate_angle(arc.vertices, tgt.z, false, 8.0 * rcap);
                    int best = -1;
                    double bdiff = 1e9;
                    for (size_t k = 0; k < tgt.dirs.size(); ++k) {
                        double diff = std::abs(wrap_angle(tgt.dirs[k] - ang_in));
                        if (diff < bdiff) {
                            bdiff = diff;
                            best = static_cast<int>(k);
                        }
                    }
                    double gate = std::min(0.1, 0.35 * 2.0 * kPi /
                                                    std::max<size_t>(1, tgt.dirs.size()));
                    if (best >= 0 && bdiff <= gate) {
                        arc.vertices.push_back(tgt.z);
                        arc.residuals.push_back(std::abs(tgt.W.real() - level));
                        arc.end.kind = tgt.kind;
                        arc.end.index = tgt.index;
                        arc.end.angle = ang_in;
                        tgt.consumed[best] = 1;
                        closed = true;
                    }
                }
            }
            if (!abort_reason.empty()) {
                std::ostringstream os;
                os << "arc from seed " << si << " direction " << di
                   << " aborted: " << abort_reason;
                result.warnings.push_back(os.str());
            }
            arc.start.angle = extrapolate_angle(arc.vertices, birth.z, true, 8.0 * rcap);
            if (closed || !abort_reason.empty()) result.arcs.push_back(std::move(arc));
        }
    }

    // Endpoint report per branch point.
    for (size_t m = 0; m < E.size(); ++m) {
        EndpointReport rep;
        rep.branch_index = static_cast<int>(m);
        auto bd = branch_directions(c, p, static_cast<int>(m));
        rep.N0 = bd.N0;
        rep.predicted_angles = bd.angles;
        for (const auto& a : result.arcs) {
            if (a.start.kind == EndpointKind::branch_point &&
                a.start.index == static_cast<int>(m)) {
                ++rep.arc_count;
                rep.measured_angles.push_back(a.start.angle);
            }
            if (a.end.kind == EndpointKind::branch_point &&
                a.end.index == static_cast<int>(m) && !a.semi_infinite) {
                ++rep.arc_count;
                rep.measured_angles.push_back(a.end.angle);
            }
        }
        if (rep.arc_count == 0)
            result.warnings.push_back("branch point " + std::to_string(m) +
                                      " not reached by any arc");
        result.endpoint_report.push_back(std::move(rep));
    }
    if (result.semi_infinite_count() != 1)
        result.warnings.push_back("semi-infinite arc count is " +
                                  std::to_string(result.semi_infinite_count()));
    return result;
}

SemistripReport validate_semistrip(const SpectrumResult& r, std::span<const cplx> V_samples) {
    SemistripReport rep;
    if (V_samples.empty()) return rep;
    rep.m1 = V_samples[0].imag();
    rep.m2 = V_samples[0].imag();
    rep.m3 = V_samples[0].real();
    for (cplx v : V_samples) {
        rep.m1 = std::min(rep.m1, v.imag());
        rep.m2 = std::max(rep.m2, v.imag());
        rep.m3 = std::min(rep.m3, v.real());
    }
    for (const auto& a : r.arcs) {
        for (cplx z : a.vertices) {
            ++rep.vertices;
            double viol = 0.0;
            viol = std::max(viol, rep.m1 - z.imag());
            viol = std::max(viol, z.imag() - rep.m2);
            viol = std::max(viol, rep.m3 - z.real());
            rep.worst_violation = std::max(rep.worst_violation, viol);
        }
    }
    return rep;
}

WeylReport weyl_phi_check(const HyperellipticCurve& c,
                          const std::function<NumericPotentialSample(double, int)>& sampler,
                          double x, cplx z, int sheet, double h) {
    int n = c.genus();
    static std::map<int, std::pair<DiffPoly, DiffPoly>> cache;
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, std::make_pair(build_F(n), build_H(n))).first;
    const DiffPoly& F = it->second.first;
    const DiffPoly& H = it->second.second;
    DiffPoly Fx = F.dx();
    int kmax = std::max(2 * n, 1);
    std::vector<cplx> cvals;
    std::vector<cplx> E(c.branch_points());
    for (int k = 1; k <= n; ++k) cvals.push_back(c_from_E(E, k));
    cplx y = static_cast<double>(sheet) * c.sqrt_R(z);

    auto phival = [&](double xx) {
        auto s = sampler(xx, kmax);
        cplx Fv = F.evaluate(s, z, cvals);
        if (std::abs(Fv) < 1e-12 * std::max(1.0, std::pow(std::abs(z), n)))
            throw std::domain_error("Dirichlet point collision: F_n(z,x) ~ 0");
        cplx Fxv = Fx.evaluate(s, z, cvals);
        return (kI * y + 0.5 * Fxv) / Fv;
    };

    WeylReport rep;
    auto s0 = sampler(x, kmax);
    cplx ph = phival(x);
    cplx ph_p = phival(x + h), ph_m = phival(x - h);
    cplx phx = (ph_p - ph_m) / (2.0 * h);
    rep.riccati_residual = std::abs(phx + ph * ph - s0.v[0] + z);

    cplx Fv = F.evaluate(s0, z, cvals);
    cplx Fxv = Fx.evaluate(s0, z, cvals);
    cplx Hv = H.evaluate(s0, z, cvals);
    cplx ph_star = (kI * (-y) + 0.5 * Fxv) / Fv;
    rep.product_residual = std::abs(ph * ph_star - Hv / Fv);
    rep.sum_residual = std::abs(ph + ph_star - Fxv / Fv);
    return rep;
}

bool arc_self_intersects(const SpectralArc& arc, double merge_radius) {
    const auto& v = arc.vertices;
    if (v.size() < 4) return false;
    // Uniform grid over segment midpoints.
    double cell = 0.0;
    for (size_t i = 0; i + 1 < v.size(); ++i) cell = std::max(cell, std::abs(v[i + 1] - v[i]));
    cell = std::max(cell * 2.0, merge_radius);
    auto key = [&](cplx z) {
        return std::make_pair(static_cast<long>(std::floor(z.real() / cell)),
                              static_cast<long>(std::floor(z.imag() / cell)));
    };
    std::map<std::pair<long, long>, std::vector<size_t>> grid;
    for (size_t i = 0; i + 1 < v.size(); ++i) grid[key(0.5 * (v[i] + v[i + 1]))].push_back(i);
    auto seg_dist = [](cplx a, cplx b, cplx c2, cplx d) {
        auto pseg = [](cplx p, cplx s0, cplx s1) {
            cplx dd = s1 - s0;
            double L2 = std::norm(dd);
            if (L2 == 0.0) return std::abs(p - s0);
            double t = std::clamp(((p - s0) * std::conj(dd)).real() / L2, 0.0, 1.0);
            return std::abs(p - (s0 + t * dd));
        };
        return std::min(std::min(pseg(a, c2, d), pseg(b, c2, d)),
                        std::min(pseg(c2, a, b), pseg(d, a, b)));
    };
    for (size_t i = 0; i + 1 < v.size(); ++i) {
        auto [kx, ky] = key(0.5 * (v[i] + v[i + 1]));
        for (long dx = -1; dx <= 1; ++dx) {
            for (long dy = -1; dy <= 1; ++dy) {
                auto itc = grid.find({kx + dx, ky + dy});
                if (itc == grid.end()) continue;
                for (size_t j : itc->second) {
                    if (j <= i + 1 && i <= j + 1) continue;  // adjacent segments
                    if (seg_dist(v[i], v[i + 1], v[j], v[j + 1]) < merge_radius) return true;
                }
            }
        }
    }
    return false;
}

namespace {

std::vector<size_t> decimate_indices(const std::vector<cplx>& v, double step) {
    std::vector<size_t> keep;
    if (v.empty()) return keep;
    keep.push_back(0);
    double acc = 0.0;
    for (size_t i = 1; i < v.size(); ++i) {
        acc += std::abs(v[i] - v[i - 1]);
        if (acc >= step || i + 1 == v.size()) {
            keep.push_back(i);
            acc = 0.0;
        }
    }
    return keep;
}

nlohmann::ordered_json cjson(cplx z) {
    return nlohmann::ordered_json::array({z.real(), z.imag()});
}

nlohmann::ordered_json arc_json(const SpectralArc& a, int id, double step) {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["arc_kind"] = a.semi_infinite ? "semi-infinite" : "finite";
    auto ep = [](const ArcEndpoint& e) {
        nlohmann::ordered_json k;
        switch (e.kind) {
            case EndpointKind::branch_point: k["type"] = "branch"; break;
            case EndpointKind::crossing: k["type"] = "crossing"; break;
            case EndpointKind::infinity_point: k["type"] = "infinity"; break;
        }
        k["index"] = e.index;
        k["angle"] = e.angle;
        return k;
    };
    j["endpoints"] = nlohmann::ordered_json::array({ep(a.start), ep(a.end)});
    auto keep = step > 0.0 ? decimate_indices(a.vertices, step)
                           : [&] {
                                 std::vector<size_t> all(a.vertices.size());
                                 for (size_t i = 0; i < all.size(); ++i) all[i] = i;
                                 return all;
                             }();
    nlohmann::ordered_json verts = nlohmann::ordered_json::array();
    nlohmann::ordered_json res = nlohmann::ordered_json::array();
    for (size_t i : keep) {
        verts.push_back(cjson(a.vertices[i]));
        res.push_back(a.residuals[i]);
    }
    j["vertices"] = verts;
    j["residuals"] = res;
    return j;
}

}  // namespace

std::string spectrum_to_json(const SpectrumResult& r, double decimate_step) {
    nlohmann::ordered_json j;
    j["arcs"] = nlohmann::ordered_json::array();
    for (size_t i = 0; i < r.arcs.size(); ++i)
        j["arcs"].push_back(arc_json(r.arcs[i], static_cast<int>(i), decimate_step));
    j["crossings"] = nlohmann::ordered_json::array();
    for (const auto& cr : r.crossings) {
        nlohmann::ordered_json k;
        k["lambda_index"] = cr.lambda_index;
        k["location"] = cjson(cr.location);
        k["multiplicity"] = cr.multiplicity;
        k["phi_value"] = cr.phi_value;
        k["directions"] = cr.directions;
        j["crossings"].push_back(k);
    }
    j["endpoint_report"] = nlohmann::ordered_json::array();
    for (const auto& rep : r.endpoint_report) {
        nlohmann::ordered_json k;
        k["branch_index"] = rep.branch_index;
        k["arc_count"] = rep.arc_count;
        k["N0"] = rep.N0;
        k["predicted_angles"] = rep.predicted_angles;
        k["measured_angles"] = rep.measured_angles;
        j["endpoint_report"].push_back(k);
    }
    j["asymptote_level"] = r.asymptote_level;
    j["basis_verified"] = r.basis_verified;
    j["warnings"] = r.warnings;
    return j.dump(2);
}

std::string spectrum_to_csv(const SpectrumResult& r, double decimate_step) {
    std::ostringstream os;
    os << "arc_id,re,im,residual\n";
    char buf[160];
    for (size_t i = 0; i < r.arcs.size(); ++i) {
        const auto& a = r.arcs[i];
        auto keep = decimate_step > 0.0 ? decimate_indices(a.vertices, decimate_step)
                                        : [&] {
                                              std::vector<size_t> all(a.vertices.size());
                                              for (size_t k = 0; k < all.size(); ++k) all[k] = k;
                                              return all;
                                          }();
        for (size_t k : keep) {
            std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.3g\n", i,
                          a.vertices[k].real(), a.vertices[k].imag(), a.residuals[k]);
            os << buf;
        }
    }
    return os.str();
}

std::string spectrum_to_svg(const SpectrumResult& r, const HyperellipticCurve& c,
                            const PeriodData& p, bool timestamp_comment,
                            double decimate_step) {
    // Window: branch points and normalization roots padded by the curve scale,
    // extended to the right for the semi-infinite arc.
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    auto absorb = [&](cplx z) {
        x0 = std::min(x0, z.real());
        x1 = std::max(x1, z.real());
        y0 = std::min(y0, z.imag());
        y1 = std::max(y1, z.imag());
    };
    for (cplx e : c.branch_points()) absorb(e);
    for (cplx l : p.lambda) absorb(l);
    double d = std::max(c.scale(), 1e-6);
    x0 -= 0.4 * d;
    x1 += 2.5 * d;
    y0 -= 0.6 * d;
    y1 += 0.6 * d;
    double W = 720.0, H = W * (y1 - y0) / (x1 - x0);
    auto sx = [&](double x) { return (x - x0) / (x1 - x0) * W; };
    auto sy = [&](double y) { return H - (y - y0) / (y1 - y0) * H; };

    std::ostringstream os;
    char buf[256];
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 ";
    std::snprintf(buf, sizeof(buf), "%.1f %.1f\">\n", W, H);
    os << buf;
    if (timestamp_comment) {
        std::time_t t = std::time(nullptr);
        char ts[64];
        std::strftime(ts, sizeof(ts), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
        os << "<!-- generated: " << ts << " -->\n";
    }
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // Asymptote of the semi-infinite arc.
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#999\" "
                  "stroke-dasharray=\"6 4\" stroke-width=\"1\"/>\n",
                  sx(x0), sy(r.asymptote_level), sx(x1), sy(r.asymptote_level));
    os << buf;
    for (const auto& a : r.arcs) {
        auto keep = decimate_step > 0.0 ? decimate_indices(a.vertices, decimate_step)
                                        : [&] {
                                              std::vector<size_t> all(a.vertices.size());
                                              for (size_t k = 0; k < all.size(); ++k) all[k] = k;
                                              return all;
                                          }();
        os << "<polyline fill=\"none\" stroke=\"#1f6fb4\" stroke-width=\"1.6\" points=\"";
        for (size_t k : keep) {
            cplx z = a.vertices[k];
            if (z.real() < x0 - d || z.real() > x1 + d) continue;
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", sx(z.real()), sy(z.imag()));
            os << buf;
        }
        os << "\"/>\n";
    }
    for (cplx e : c.branch_points()) {
        std::snprintf(buf, sizeof(buf),
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3.5\" fill=\"black\"/>\n",
                      sx(e.real()), sy(e.imag()));
        os << buf;
    }
    for (cplx l : p.lambda) {
        double x = sx(l.real()), y = sy(l.imag());
        std::snprintf(buf, sizeof(buf),
                      "<path d=\"M %.2f %.2f L %.2f %.2f M %.2f %.2f L %.2f %.2f\" "
                      "stroke=\"#c23b22\" stroke-width=\"1.6\"/>\n",
                      x - 4, y - 4, x + 4, y + 4, x - 4, y + 4, x + 4, y - 4);
        os << buf;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace kdvspec
