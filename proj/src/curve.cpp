#include "kdvspec/curve.hpp"

#include "kdvspec/hierarchy.hpp"
#include "kdvspec/polyroots.hpp"
#include "kdvspec/quadrature.hpp"

#include <Eigen/Dense>

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace kdvspec {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx kI{0.0, 1.0};

double wrap_2pi(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a <= 0.0) a += 2.0 * kPi;
    return a;
}

double point_segment_distance(cplx p, cplx a, cplx b) {
    cplx d = b - a;
    double L2 = std::norm(d);
    if (L2 == 0.0) return std::abs(p - a);
    double t = std::clamp(((p - a) * std::conj(d)).real() / L2, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

// Proper crossing test including touching within eps.
bool segments_intersect(cplx a, cplx b, cplx c, cplx d, double eps) {
    auto cross = [](cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); };
    double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
    double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    return point_segment_distance(c, a, b) < eps || point_segment_distance(d, a, b) < eps ||
           point_segment_distance(a, c, d) < eps || point_segment_distance(b, c, d) < eps;
}

double segment_segment_distance(cplx a, cplx b, cplx c, cplx d) {
    if (segments_intersect(a, b, c, d, 0.0)) return 0.0;
    return std::min(std::min(point_segment_distance(a, c, d), point_segment_distance(b, c, d)),
                    std::min(point_segment_distance(c, a, b), point_segment_distance(d, a, b)));
}

bool lex_less(cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

}  // namespace

HyperellipticCurve HyperellipticCurve::create(std::vector<cplx> E,
                                              const std::optional<CutPairingHint>& hint) {
    if (E.empty() || E.size() % 2 == 0)
        throw CurveError("need an odd number (2n+1) of branch points");
    if (E.size() > 17) throw CurveError("genus above the supported numerical cap (8)");
    HyperellipticCurve c;
    c.E_ = std::move(E);
    double diam = 0.0;
    for (size_t i = 0; i < c.E_.size(); ++i)
        for (size_t j = i + 1; j < c.E_.size(); ++j)
            diam = std::max(diam, std::abs(c.E_[i] - c.E_[j]));
    c.scale_ = diam > 0.0 ? diam : 1.0;
    for (size_t i = 0; i < c.E_.size(); ++i)
        for (size_t j = i + 1; j < c.E_.size(); ++j)
            if (std::abs(c.E_[i] - c.E_[j]) < 1e-12 * c.scale_)
                throw CurveError("duplicate branch points");
    c.sorted_.resize(c.E_.size());
    std::iota(c.sorted_.begin(), c.sorted_.end(), 0);
    std::sort(c.sorted_.begin(), c.sorted_.end(),
              [&](int i, int j) { return lex_less(c.E_[i], c.E_[j]); });
    c.build_cuts(hint);
    // Branch sign anchor: a far reference point just off the ray.
    const Cut& ray = c.cuts_.back();
    c.anchor_ref_ = ray.pa + 50.0 * c.scale_ * std::exp(kI * (ray.ray_angle + 0.05));
    c.anchor_val_ = c.sqrt_R(c.anchor_ref_);
    if (std::abs(c.anchor_val_ * c.anchor_val_ / c.R(c.anchor_ref_) - 1.0) > 1e-8)
        throw CurveError("square-root branch inconsistency at the anchor point");
    return c;
}

void HyperellipticCurve::build_cuts(const std::optional<CutPairingHint>& hint) {
    int n = genus();
    std::vector<std::pair<int, int>> pairs;
    int ray_index;
    std::optional<double> ray_angle_hint;
    if (hint) {
        pairs = hint->pairs;
        ray_index = hint->ray_index;
        ray_angle_hint = hint->ray_angle;
        std::vector<char> used(E_.size(), 0);
        for (auto& [i, j] : pairs) {
            if (i < 0 || j < 0 || i >= static_cast<int>(E_.size()) ||
                j >= static_cast<int>(E_.size()) || i == j)
                throw CurveError("invalid pairing hint");
            used[i] = used[j] = 1;
        }
        if (ray_index < 0 || ray_index >= static_cast<int>(E_.size()) || used[ray_index] ||
            static_cast<int>(pairs.size()) != n)
            throw CurveError("pairing hint must cover all branch points exactly once");
    } else {
        for (int j = 0; j < n; ++j) pairs.emplace_back(sorted_[2 * j], sorted_[2 * j + 1]);
        ray_index = sorted_[2 * n];
    }

    cuts_.clear();
    for (auto& [i, j] : pairs) {
        Cut cut;
        cut.ia = i;
        cut.ib = j;
        cut.pa = E_[i];
        cut.pb = E_[j];
        cuts_.push_back(cut);
    }

    // Ray direction: the hinted angle, or +1 rotated in small alternating steps
    // until the ray clears every cut and branch point.
    cplx base = E_[ray_index];
    double Lfar = 1e6 * scale_;
    auto ray_ok = [&](double ang) {
        cplx tip = base + Lfar * std::exp(kI * ang);
        for (const Cut& cut : cuts_)
            if (segment_segment_distance(base, tip, cut.pa, cut.pb) < 1e-3 * scale_)
                return false;
        for (size_t m = 0; m < E_.size(); ++m) {
            if (static_cast<int>(m) == ray_index) continue;
            if (point_segment_distance(E_[m], base, tip) < 1e-3 * scale_) return false;
        }
        return true;
    };
    double angle = 0.0;
    bool found = false;
    if (ray_angle_hint) {
        angle = *ray_angle_hint;
        found = ray_ok(angle);
    } else {
        for (int k = 0; k <= 72 && !found; ++k) {
            for (double s : {1.0, -1.0}) {
                double cand = s * k * (kPi / 72.0);
                if (ray_ok(cand)) {
                    angle = cand;
                    found = true;
                    break;
                }
            }
            if (k == 0 && found) break;
        }
    }
    if (!found) throw CurveError("no non-intersecting cut system found for the given hint");
    Cut ray;
    ray.is_ray = true;
    ray.ia = ray_index;
    ray.pa = base;
    ray.ray_angle = angle;
    ray.pb = base + Lfar * std::exp(kI * angle);
    cuts_.push_back(ray);

    // Pairwise disjointness of the finite cuts.
    for (size_t i = 0; i < cuts_.size(); ++i) {
        for (size_t j = i + 1; j < cuts_.size(); ++j) {
            if (segment_segment_distance(cuts_[i].pa, cuts_[i].pb, cuts_[j].pa, cuts_[j].pb) <
                1e-9 * scale_)
                throw CurveError("cut system is not disjoint");
        }
    }
    // No stray branch point may sit on a cut.
    for (size_t m = 0; m < E_.size(); ++m) {
        for (const Cut& cut : cuts_) {
            if (static_cast<int>(m) == cut.ia || static_cast<int>(m) == cut.ib) continue;
            if (point_segment_distance(E_[m], cut.pa, cut.pb) < 1e-9 * scale_)
                throw CurveError("branch point lies on a cut");
        }
    }
}

cplx HyperellipticCurve::base_branch_point() const { return E_[sorted_[0]]; }

cplx HyperellipticCurve::R(cplx z) const {
    cplx r = 1.0;
    for (cplx e : E_) r *= (z - e);
    return r;
}

cplx HyperellipticCurve::sqrt_R(cplx z) const {
    // Pair factors use q2 = (z-pa)(z-pb)/(z-cen)^2 in factored form (no
    // cancellation near the endpoints) and a fixed boundary-limit convention
    // when z lands exactly on the cut line, so on-cut evaluation is
    // deterministic and continuous along each side.
    cplx prod = 1.0;
    for (const Cut& cut : cuts_) {
        if (cut.is_ray) {
            cplx d = z - cut.pa;
            double beta = cut.ray_angle + wrap_2pi(std::arg(d) - cut.ray_angle);
            prod *= std::sqrt(std::abs(d)) * std::exp(kI * beta / 2.0);
        } else {
            cplx cen = 0.5 * (cut.pa + cut.pb), h = 0.5 * (cut.pb - cut.pa);
            cplx w = (z - cen) / h;
            if (std::abs(w) < 1e-14) {  // cut midpoint: limit value, + side
                prod *= kI * h;
                continue;
            }
            cplx q2 = ((z - cut.pa) / h) * ((z - cut.pb) / h) / (w * w);
            cplx root;
            if (q2.imag() == 0.0 && q2.real() < 0.0)
                root = kI * (w.real() >= 0.0 ? 1.0 : -1.0) * std::sqrt(-q2.real());
            else
                root = std::sqrt(q2);
            prod *= h * w * root;
        }
    }
    return prod;
}

cplx HyperellipticCurve::sqrt_R_side(int cut_index, cplx z, int side) const {
    cplx prod = 1.0;
    for (size_t k = 0; k < cuts_.size(); ++k) {
        const Cut& cut = cuts_[k];
        if (static_cast<int>(k) == cut_index) {
            if (cut.is_ray) {
                cplx d = z - cut.pa;
                prod *= static_cast<double>(side) * std::sqrt(std::abs(d)) *
                        std::exp(kI * cut.ray_angle / 2.0);
            } else {
                cplx cen = 0.5 * (cut.pa + cut.pb), h = 0.5 * (cut.pb - cut.pa);
                double u = std::clamp(((z - cen) / h).real(), -1.0, 1.0);
                prod *= kI * static_cast<double>(side) * h * std::sqrt(1.0 - u * u);
            }
        } else if (cut.is_ray) {
            cplx d = z - cut.pa;
            double beta = cut.ray_angle + wrap_2pi(std::arg(d) - cut.ray_angle);
            prod *= std::sqrt(std::abs(d)) * std::exp(kI * beta / 2.0);
        } else {
            cplx cen = 0.5 * (cut.pa + cut.pb), h = 0.5 * (cut.pb - cut.pa);
            cplx w = (z - cen) / h;
            prod *= h * w * std::sqrt(1.0 - 1.0 / (w * w));
        }
    }
    return prod;
}

double HyperellipticCurve::distance_to_cuts(cplx z, int* which) const {
    double best = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < cuts_.size(); ++k) {
        double d = point_segment_distance(z, cuts_[k].pa, cuts_[k].pb);
        if (d < best) {
            best = d;
            if (which) *which = static_cast<int>(k);
        }
    }
    return best;
}

bool HyperellipticCurve::segment_clear(cplx z0, cplx z1, double margin,
                                       std::span<const cplx> ignore_endpoints) const {
    // Endpoints sitting on branch points are legitimate; test a slightly
    // shrunken core segment for clearance and the full segment for crossings.
    auto is_ignored = [&](cplx p) {
        for (cplx q : ignore_endpoints)
            if (std::abs(p - q) < 1e-9 * scale_) return true;
        return false;
    };
    double shrink = std::min(0.25, 2.0 * margin / std::max(std::abs(z1 - z0), 1e-300));
    cplx a = z0 + (is_ignored(z0) ? shrink * (z1 - z0) : cplx(0.0, 0.0));
    cplx b = z1 - (is_ignored(z1) ? shrink * (z1 - z0) : cplx(0.0, 0.0));
    for (const Cut& cut : cuts_) {
        if (segments_intersect(a, b, cut.pa, cut.pb, 0.0)) return false;
        if (segment_segment_distance(a, b, cut.pa, cut.pb) < margin) return false;
    }
    return true;
}

std::vector<cplx> HyperellipticCurve::plan_path(cplx z0, cplx z1, double margin) const {
    std::array<cplx, 2> ends = {z0, z1};
    std::function<std::vector<cplx>(cplx, cplx, int)> route = [&](cplx a, cplx b,
                                                                  int depth) -> std::vector<cplx> {
        if (segment_clear(a, b, margin, ends)) return {a, b};
        if (depth <= 0) throw PathError("path planner failed: cut system too tangled");
        // The cut closest to the blocked segment.
        const Cut* blocker = nullptr;
        double best = std::numeric_limits<double>::infinity();
        for (const Cut& cut : cuts_) {
            double d = segment_segment_distance(a, b, cut.pa, cut.pb);
            if (d < best) {
                best = d;
                blocker = &cut;
            }
        }
        if (!blocker) throw PathError("path planner inconsistency");
        cplx t = (b - a) / std::abs(b - a);
        cplx left = kI * t;
        double m = 4.0 * margin;
        std::vector<cplx> candidates;
        cplx dir = blocker->is_ray ? std::exp(kI * blocker->ray_angle)
                                   : (blocker->pb - blocker->pa) / std::abs(blocker->pb - blocker->pa);
        // Go around an endpoint of the blocking cut, left of travel first.
        if (blocker->is_ray) {
            candidates = {blocker->pa - m * dir + m * left, blocker->pa - m * dir - m * left,
                          blocker->pa - m * dir};
        } else {
            candidates = {blocker->pa - m * dir + m * left, blocker->pb + m * dir + m * left,
                          blocker->pa - m * dir - m * left, blocker->pb + m * dir - m * left,
                          blocker->pa - m * dir,            blocker->pb + m * dir};
        }
        for (cplx w : candidates) {
            if (distance_to_cuts(w) < margin) continue;
            try {
                auto first = route(a, w, depth - 1);
                auto second = route(w, b, depth - 1);
                first.insert(first.end(), second.begin() + 1, second.end());
                return first;
            } catch (const PathError&) {
            }
        }
        throw PathError("path planner failed: cut system too tangled");
    };
    return route(z0, z1, 6);
}

cplx TrackedSqrt::eval(cplx z) {
    cplx v = c_->sqrt_R(z);
    if (have_prev_) {
        if (std::abs(v - prev_) > std::abs(v + prev_)) v = -v;
    }
    prev_ = v;
    have_prev_ = true;
    return v;
}

void TrackedSqrt::seed(cplx z, cplx value) {
    (void)z;
    prev_ = value;
    have_prev_ = true;
}

namespace {

// Connector between consecutive cuts: nearest endpoints, deterministic ties.
std::pair<cplx, cplx> connector_endpoints(const HyperellipticCurve& c, int j) {
    const Cut& c1 = c.cuts()[j];
    const Cut& c2 = c.cuts()[j + 1];
    std::vector<std::pair<cplx, cplx>> options;
    if (c2.is_ray) {
        options = {{c1.pb, c2.pa}, {c1.pa, c2.pa}};
    } else {
        options = {{c1.pb, c2.pa}, {c1.pa, c2.pa}, {c1.pb, c2.pb}, {c1.pa, c2.pb}};
    }
    size_t best = 0;
    for (size_t i = 1; i < options.size(); ++i) {
        double d = std::abs(options[i].first - options[i].second);
        double db = std::abs(options[best].first - options[best].second);
        if (d < db - 1e-12 * c.scale()) best = i;
    }
    return options[best];
}

// 2 * integral of z^k / sqrt_R along the polyline; first/last legs end at
// branch points.
std::vector<cplx> connector_periods(const HyperellipticCurve& c, int j, int kmax,
                                    double tol, double* err_acc, bool* converged) {
    auto [from, to] = connector_endpoints(c, j);
    auto path = c.plan_path(from, to, 1e-3 * c.scale());
    std::vector<cplx> out(kmax + 1, 0.0);
    for (size_t leg = 0; leg + 1 < path.size(); ++leg) {
        bool s0 = leg == 0, s1 = leg + 2 == path.size();
        for (int k = 0; k <= kmax; ++k) {
            // Finite-guard: when an unreachable tolerance drives panels onto
            // the branch point itself, drop the sample and let the converged
            // flag report the failure.
            auto f = [&](cplx z) {
                cplx v = std::pow(z, k) / c.sqrt_R(z);
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return cplx(0.0, 0.0);
                return v;
            };
            auto r = integrate_segment_endpoint_sqrt(f, path[leg], path[leg + 1], s0, s1, tol);
            out[k] += 2.0 * r.value;
            if (err_acc) *err_acc += 2.0 * r.error;
            if (converged && !r.converged) *converged = false;
        }
    }
    return out;
}

// 2 * integral of z^k / sqrt_R over the + side of finite cut j; the sqrt
// endpoint factors cancel against the Chebyshev parametrization exactly.
std::vector<cplx> loop_periods(const HyperellipticCurve& c, int j, int kmax, double tol,
                               double* err_acc, bool* converged) {
    const Cut& cut = c.cuts()[j];
    cplx cen = 0.5 * (cut.pa + cut.pb), h = 0.5 * (cut.pb - cut.pa);
    std::vector<cplx> out(kmax + 1, 0.0);
    for (int k = 0; k <= kmax; ++k) {
        auto f = [&](double th) {
            double u = -std::cos(th);
            cplx z = cen + h * u;
            // integrand z^k/sqrt_side * dz with dz = h sin(th) dth and
            // sqrt_side = i h sin(th) * (other factors)
            cplx others = 1.0;
            for (size_t q = 0; q < c.cuts().size(); ++q) {
                if (static_cast<int>(q) == j) continue;
                const Cut& oc = c.cuts()[q];
                if (oc.is_ray) {
                    cplx d = z - oc.pa;
                    double beta = oc.ray_angle + wrap_2pi(std::arg(d) - oc.ray_angle);
                    others *= std::sqrt(std::abs(d)) * std::exp(kI * beta / 2.0);
                } else {
                    cplx ocen = 0.5 * (oc.pa + oc.pb), oh = 0.5 * (oc.pb - oc.pa);
                    cplx w = (z - ocen) / oh;
                    others *= oh * w * std::sqrt(1.0 - 1.0 / (w * w));
                }
            }
            return std::pow(z, k) / (kI * others);
        };
        auto r = integrate_adaptive(f, 0.0, kPi, tol);
        out[k] += 2.0 * r.value;
        if (err_acc) *err_acc += 2.0 * r.error;
        if (converged && !r.converged) *converged = false;
    }
    return out;
}

void solve_normalization(const PeriodData& p, const std::vector<std::vector<cplx>>& amono,
                         std::vector<cplx>* coeffs, bool* ok) {
    int n = p.genus;
    Eigen::MatrixXcd A(n, n);
    Eigen::VectorXcd rhs(n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) A(j, k) = amono[j][k];
        rhs(j) = -amono[j][n];
    }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
    if (!lu.isInvertible()) {
        *ok = false;
        return;
    }
    Eigen::VectorXcd x = lu.solve(rhs);
    coeffs->assign(n, 0.0);
    for (int k = 0; k < n; ++k) (*coeffs)[k] = x(k);
    *ok = true;
}

std::vector<cplx> bperiods_for(const PeriodData& p,
                               const std::vector<std::vector<cplx>>& bmono,
                               const std::vector<cplx>& coeffs) {
    int n = p.genus;
    std::vector<cplx> out(n, 0.0);
    for (int j = 0; j < n; ++j) {
        cplx acc = bmono[j][n];
        for (int k = 0; k < n; ++k) acc += coeffs[k] * bmono[j][k];
        out[j] = 0.5 * kI * acc;
    }
    return out;
}

}  // namespace

cplx PeriodData::mean_g_poly(cplx z) const {
    cplx acc = 1.0;  // Horner over z^n + sum poly[k] z^k
    for (int k = genus - 1; k >= 0; --k) acc = acc * z + poly[k];
    return acc;
}

PeriodData normalize_lambda(const HyperellipticCurve& c, double quad_tol) {
    PeriodData p;
    int n = c.genus();
    p.genus = n;
    p.basis_transform.assign(2 * n, std::vector<int>(2 * n, 0));
    for (int i = 0; i < 2 * n; ++i) p.basis_transform[i][i] = 1;
    p.a_mono.resize(n);
    p.b_mono.resize(n);
    std::vector<std::vector<cplx>> loops(n);
    for (int j = 0; j < n; ++j) {
        p.a_mono[j] = connector_periods(c, j, n, quad_tol, &p.quad_error, &p.quad_converged);
        loops[j] = loop_periods(c, j, n, quad_tol, &p.quad_error, &p.quad_converged);
    }
    // Canonical b-cycles: nested sums of the cut loops.
    for (int j = 0; j < n; ++j) {
        p.b_mono[j].assign(n + 1, 0.0);
        for (int i = 0; i <= j; ++i)
            for (int k = 0; k <= n; ++k) p.b_mono[j][k] += loops[i][k];
    }
    if (n == 0) {
        cplx s = 0.0;
        for (cplx e : c.branch_points()) s += e;
        p.mean_V = s;
        return p;
    }
    bool ok = false;
    solve_normalization(p, p.a_mono, &p.poly, &ok);
    if (!ok) throw CurveError("normalization system is singular");
    std::vector<cplx> coeffs(p.poly);
    coeffs.push_back(1.0);
    p.lambda = poly_roots(coeffs);
    cplx s = 0.0;
    for (cplx e : c.branch_points()) s += e;
    for (cplx l : p.lambda) s -= 2.0 * l;
    p.mean_V = s;
    return p;
}

cplx a_period(const HyperellipticCurve& c, std::span<const cplx> poly_coeffs, int j,
              double quad_tol) {
    if (j < 1 || j > c.genus()) throw CurveError("a-cycle index out of range");
    auto mono = connector_periods(c, j - 1, static_cast<int>(poly_coeffs.size()) - 1,
                                  quad_tol, nullptr, nullptr);
    cplx acc = 0.0;
    for (size_t k = 0; k < poly_coeffs.size(); ++k) acc += poly_coeffs[k] * mono[k];
    return acc;
}

std::vector<cplx> b_periods_of_mean_g(const HyperellipticCurve& c, PeriodData& p,
                                      double tol) {
    (void)c;
    p.b_periods_gdz = bperiods_for(p, p.b_mono, p.poly);
    p.max_re_b = 0.0;
    double scale = 0.0;
    for (cplx b : p.b_periods_gdz) {
        p.max_re_b = std::max(p.max_re_b, std::abs(b.real()));
        scale = std::max(scale, std::abs(b));
    }
    p.basis_verified = p.max_re_b <= tol * std::max(1.0, scale);
    return p.b_periods_gdz;
}

namespace {

std::vector<std::array<int, 4>> sl2_candidates(int bound) {
    std::vector<std::array<int, 4>> out;
    for (int a = -bound; a <= bound; ++a)
        for (int b = -bound; b <= bound; ++b)
            for (int cc = -bound; cc <= bound; ++cc)
                for (int d = -bound; d <= bound; ++d)
                    if (a * d - b * cc == 1) out.push_back({a, b, cc, d});
    return out;
}

}  // namespace

BasisSearchOutcome symplectic_basis_search(const HyperellipticCurve& c, PeriodData& p,
                                           int bound, double tol) {
    int n = p.genus;
    if (n == 0) {
        p.basis_verified = true;
        return BasisSearchOutcome::verified;
    }
    if (p.b_periods_gdz.empty()) b_periods_of_mean_g(c, p, tol);
    // Per-handle blocks explode combinatorially with genus; clamp the entry
    // bound beyond genus two.
    int eff_bound = n >= 3 ? std::min(bound, 1) : bound;
    auto cands = sl2_candidates(std::max(1, eff_bound));

    // Candidate per-handle blocks; score a choice by the worst |Re| of the
    // transformed b-periods after re-normalizing in the transformed basis.
    std::vector<int> best_choice(n, 0);
    int id_idx = 0;
    for (size_t i = 0; i < cands.size(); ++i)
        if (cands[i] == std::array<int, 4>{1, 0, 0, 1}) id_idx = static_cast<int>(i);
    std::fill(best_choice.begin(), best_choice.end(), id_idx);

    auto eval_choice = [&](const std::vector<int>& ch, double* score,
                           std::vector<cplx>* coeffs, std::vector<cplx>* bper) {
        std::vector<std::vector<cplx>> amono(n), bmono(n);
        for (int j = 0; j < n; ++j) {
            auto [a, b, cc, d] = cands[ch[j]];
            amono[j].assign(n + 1, 0.0);
            bmono[j].assign(n + 1, 0.0);
            for (int k = 0; k <= n; ++k) {
                amono[j][k] = static_cast<double>(a) * p.a_mono[j][k] +
                              static_cast<double>(b) * p.b_mono[j][k];
                bmono[j][k] = static_cast<double>(cc) * p.a_mono[j][k] +
                              static_cast<double>(d) * p.b_mono[j][k];
            }
        }
        bool ok = false;
        solve_normalization(p, amono, coeffs, &ok);
        if (!ok) {
            *score = std::numeric_limits<double>::infinity();
            return;
        }
        *bper = bperiods_for(p, bmono, *coeffs);
        double s = 0.0;
        for (cplx b : *bper) s = std::max(s, std::abs(b.real()));
        *score = s;
    };

    double best_score;
    std::vector<cplx> best_coeffs, best_bper;
    eval_choice(best_choice, &best_score, &best_coeffs, &best_bper);

    // Exhaustive over per-handle blocks (full Sp(2n,Z) restricted to
    // handle-diagonal transforms; genus one gets the whole group).
    std::vector<int> idx(n, 0);
    for (;;) {
        double score;
        std::vector<cplx> coeffs, bper;
        eval_choice(idx, &score, &coeffs, &bper);
        if (score < best_score - 1e-15) {
            best_score = score;
            best_choice = idx;
            best_coeffs = coeffs;
            best_bper = bper;
        }
        int j = 0;
        while (j < n && ++idx[j] >= static_cast<int>(cands.size())) idx[j++] = 0;
        if (j == n) break;
    }

    // Apply the best transform.
    std::vector<std::vector<cplx>> amono(n), bmono(n);
    for (int j = 0; j < n; ++j) {
        auto [a, b, cc, d] = cands[best_choice[j]];
        amono[j].assign(n + 1, 0.0);
        bmono[j].assign(n + 1, 0.0);
        for (int k = 0; k <= n; ++k) {
            amono[j][k] = static_cast<double>(a) * p.a_mono[j][k] +
                          static_cast<double>(b) * p.b_mono[j][k];
            bmono[j][k] = static_cast<double>(cc) * p.a_mono[j][k] +
                          static_cast<double>(d) * p.b_mono[j][k];
        }
    }
    p.a_mono = amono;
    p.b_mono = bmono;
    p.poly = best_coeffs;
    std::vector<cplx> coeffs(p.poly);
    coeffs.push_back(1.0);
    p.lambda = poly_roots(coeffs);
    cplx s = 0.0;
    for (cplx e : c.branch_points()) s += e;
    for (cplx l : p.lambda) s -= 2.0 * l;
    p.mean_V = s;
    p.b_periods_gdz = best_bper;
    p.max_re_b = best_score;
    double pscale = 0.0;
    for (cplx b : best_bper) pscale = std::max(pscale, std::abs(b));
    p.basis_verified = best_score <= tol * std::max(1.0, pscale);
    p.basis_transform.assign(2 * n, std::vector<int>(2 * n, 0));
    for (int j = 0; j < n; ++j) {
        auto [a, b, cc, d] = cands[best_choice[j]];
        p.basis_transform[j][j] = a;
        p.basis_transform[j][n + j] = b;
        p.basis_transform[n + j][j] = cc;
        p.basis_transform[n + j][n + j] = d;
    }
    return p.basis_verified ? BasisSearchOutcome::verified : BasisSearchOutcome::not_found;
}

std::vector<cplx> dirichlet_mu(const HyperellipticCurve& c,
                               const NumericPotentialSample& sample) {
    int n = c.genus();
    auto f = f_sequence(n);
    std::vector<cplx> E(c.branch_points());
    std::vector<cplx> cvals;
    for (int k = 1; k <= n; ++k) cvals.push_back(c_from_E(E, k));
    std::vector<cplx> coeffs(n + 1);
    for (int l = 0; l <= n; ++l) coeffs[l] = f[n - l].evaluate(sample, 0.0, cvals);
    return poly_roots(coeffs);
}

namespace {

nlohmann::ordered_json cplx_json(cplx z) { return nlohmann::ordered_json::array({z.real(), z.imag()}); }

cplx cplx_from_json(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

std::string HyperellipticCurve::to_json() const {
    nlohmann::ordered_json j;
    j["branch_points"] = nlohmann::ordered_json::array();
    for (cplx e : E_) j["branch_points"].push_back(cplx_json(e));
    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (const Cut& cut : cuts_)
        if (!cut.is_ray) pairs.push_back(nlohmann::ordered_json::array({cut.ia, cut.ib}));
    j["cuts"] = {{"pairs", pairs},
                 {"ray_index", cuts_.back().ia},
                 {"ray_angle", cuts_.back().ray_angle}};
    j["anchor"] = {{"z_ref", cplx_json(anchor_ref_)}, {"value", cplx_json(anchor_val_)}};
    return j.dump(2);
}

HyperellipticCurve HyperellipticCurve::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    std::vector<cplx> E;
    for (const auto& e : j.at("branch_points")) E.push_back(cplx_from_json(e));
    CutPairingHint hint;
    for (const auto& pr : j.at("cuts").at("pairs"))
        hint.pairs.emplace_back(pr.at(0).get<int>(), pr.at(1).get<int>());
    hint.ray_index = j.at("cuts").at("ray_index").get<int>();
    hint.ray_angle = j.at("cuts").at("ray_angle").get<double>();
    return create(std::move(E), hint);
}

std::string period_data_to_json(const PeriodData& p) {
    nlohmann::ordered_json j;
    j["genus"] = p.genus;
    j["lambda"] = nlohmann::ordered_json::array();
    for (cplx l : p.lambda) j["lambda"].push_back(cplx_json(l));
    j["mean_V"] = cplx_json(p.mean_V);
    j["b_periods_gdz"] = nlohmann::ordered_json::array();
    for (cplx b : p.b_periods_gdz) j["b_periods_gdz"].push_back(cplx_json(b));
    j["max_re_b"] = p.max_re_b;
    j["basis_verified"] = p.basis_verified;
    j["basis_transform"] = p.basis_transform;
    j["quad_error"] = p.quad_error;
    j["quad_converged"] = p.quad_converged;
    return j.dump(2);
}

}  // namespace kdvspec
