#include "kdvspec/elliptic.hpp"

#include "kdvspec/hierarchy.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace kdvspec {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx kI{0.0, 1.0};

// Jacobi theta_1(w | tau) and w-derivatives up to order kmax.
// theta_1(w) = 2 sum_{n>=0} (-1)^n exp(i pi tau (n+1/2)^2) sin((2n+1) w).
std::vector<cplx> theta1_derivs(cplx w, cplx tau, int kmax) {
    std::vector<cplx> acc(kmax + 1, 0.0);
    double floor_scale = 0.0;
    int quiet = 0;
    for (int n = 0; n < 96; ++n) {
        double m = n + 0.5;
        cplx qpow = std::exp(kI * kPi * tau * (m * m));
        cplx arg = (2.0 * n + 1.0) * w;
        cplx s = std::sin(arg), c = std::cos(arg);
        double sign = (n % 2) ? -1.0 : 1.0;
        double tmax = 0.0;
        cplx base = 2.0 * sign * qpow;
        double fac = 1.0;
        for (int k = 0; k <= kmax; ++k) {
            cplx trig;
            switch (k % 4) {
                case 0: trig = s; break;
                case 1: trig = c; break;
                case 2: trig = -s; break;
                default: trig = -c; break;
            }
            cplx term = base * fac * trig;
            acc[k] += term;
            tmax = std::max(tmax, std::abs(term));
            fac *= (2.0 * n + 1.0);
        }
        floor_scale = std::max(floor_scale, std::abs(acc[0]));
        if (tmax < 1e-18 * std::max(1.0, floor_scale)) {
            if (++quiet >= 2) break;
        } else {
            quiet = 0;
        }
    }
    return acc;
}

struct CellReduction {
    cplx u0;
    long m = 0, n = 0;  // u = u0 + 2 m omega1 + 2 n omega3
};

CellReduction reduce_to_cell(const LatticeParams& l, cplx u) {
    double a11 = 2.0 * l.omega1.real(), a12 = 2.0 * l.omega3.real();
    double a21 = 2.0 * l.omega1.imag(), a22 = 2.0 * l.omega3.imag();
    double det = a11 * a22 - a12 * a21;
    double s = (a22 * u.real() - a12 * u.imag()) / det;
    double t = (-a21 * u.real() + a11 * u.imag()) / det;
    CellReduction r;
    r.m = std::lround(s);
    r.n = std::lround(t);
    r.u0 = u - 2.0 * static_cast<double>(r.m) * l.omega1 - 2.0 * static_cast<double>(r.n) * l.omega3;
    return r;
}

double lattice_scale(const LatticeParams& l) {
    return std::max(std::abs(l.omega1), std::abs(l.omega3));
}

void require_not_lattice_point(const LatticeParams& l, cplx u0) {
    if (std::abs(u0) < 1e-12 * lattice_scale(l))
        throw std::domain_error("Weierstrass function evaluated at a lattice point");
}

cplx half_arg(const LatticeParams& l, cplx u0) { return kPi * u0 / (2.0 * l.omega1); }

cplx wp_from_theta(const LatticeParams& l, cplx u0) {
    cplx w = half_arg(l, u0);
    auto th = theta1_derivs(w, l.tau, 2);
    cplx lt2 = th[2] / th[0] - (th[1] / th[0]) * (th[1] / th[0]);
    cplx f = kPi / (2.0 * l.omega1);
    return -l.eta1 / l.omega1 - f * f * lt2;
}

cplx wp_prime_from_theta(const LatticeParams& l, cplx u0) {
    cplx w = half_arg(l, u0);
    auto th = theta1_derivs(w, l.tau, 3);
    cplx r1 = th[1] / th[0], r2 = th[2] / th[0], r3 = th[3] / th[0];
    cplx lt3 = r3 - 3.0 * r2 * r1 + 2.0 * r1 * r1 * r1;
    cplx f = kPi / (2.0 * l.omega1);
    return -f * f * f * lt3;
}

}  // namespace

cplx theta_genus1(cplx z, cplx tau) { return theta_genus1_derivs(z, tau)[0]; }

std::array<cplx, 3> theta_genus1_derivs(cplx z, cplx tau) {
    if (tau.imag() <= 0.0) throw std::invalid_argument("theta: Im(tau) must be positive");
    std::array<cplx, 3> acc{0.0, 0.0, 0.0};
    acc[0] = 1.0;  // n = 0 term
    double scale = 1.0;
    int quiet = 0;
    for (int n = 1; n < 128; ++n) {
        double dn = n;
        cplx e = std::exp(kI * kPi * tau * dn * dn);
        cplx ep = std::exp(2.0 * kPi * kI * dn * z), em = std::exp(-2.0 * kPi * kI * dn * z);
        cplx d0 = e * (ep + em);
        cplx d1 = e * (2.0 * kPi * kI * dn) * (ep - em);
        cplx d2 = e * (2.0 * kPi * kI * dn) * (2.0 * kPi * kI * dn) * (ep + em);
        acc[0] += d0;
        acc[1] += d1;
        acc[2] += d2;
        scale = std::max(scale, std::abs(acc[0]));
        double t = std::max({std::abs(d0), std::abs(d1), std::abs(d2)});
        if (t < 1e-16 * scale) {
            if (++quiet >= 2) break;
        } else {
            quiet = 0;
        }
    }
    return acc;
}

ThetaResult riemann_theta(const std::vector<cplx>& z,
                          const std::vector<std::vector<cplx>>& tau, int radius) {
    size_t g = z.size();
    if (tau.size() != g) throw std::invalid_argument("riemann_theta: tau size mismatch");
    for (size_t i = 0; i < g; ++i) {
        if (tau[i].size() != g) throw std::invalid_argument("riemann_theta: tau not square");
        for (size_t j = 0; j < g; ++j)
            if (std::abs(tau[i][j] - tau[j][i]) > 1e-12 * (1.0 + std::abs(tau[i][j])))
                throw std::invalid_argument("riemann_theta: tau not symmetric");
    }
    // Positive-definiteness of Im(tau) via leading principal minors.
    {
        std::vector<std::vector<double>> im(g, std::vector<double>(g));
        for (size_t i = 0; i < g; ++i)
            for (size_t j = 0; j < g; ++j) im[i][j] = tau[i][j].imag();
        for (size_t k = 1; k <= g; ++k) {
            std::vector<std::vector<double>> mm(k, std::vector<double>(k));
            for (size_t i = 0; i < k; ++i)
                for (size_t j = 0; j < k; ++j) mm[i][j] = im[i][j];
            double det = 1.0;
            for (size_t col = 0; col < k; ++col) {
                size_t piv = col;
                for (size_t r = col + 1; r < k; ++r)
                    if (std::abs(mm[r][col]) > std::abs(mm[piv][col])) piv = r;
                if (piv != col) {
                    std::swap(mm[piv], mm[col]);
                    det = -det;
                }
                if (mm[col][col] == 0.0) {
                    det = 0.0;
                    break;
                }
                det *= mm[col][col];
                for (size_t r = col + 1; r < k; ++r) {
                    double f = mm[r][col] / mm[col][col];
                    for (size_t cc = col; cc < k; ++cc) mm[r][cc] -= f * mm[col][cc];
                }
            }
            if (det <= 0.0)
                throw std::invalid_argument("riemann_theta: Im(tau) not positive definite");
        }
    }

    ThetaResult out{cplx(0.0, 0.0), 0.0};
    std::vector<int> n(g, -radius);
    for (;;) {
        cplx lin = 0.0, quad = 0.0;
        int maxabs = 0;
        for (size_t i = 0; i < g; ++i) {
            lin += static_cast<double>(n[i]) * z[i];
            for (size_t j = 0; j < g; ++j)
                quad += static_cast<double>(n[i]) * static_cast<double>(n[j]) * tau[i][j];
            maxabs = std::max(maxabs, std::abs(n[i]));
        }
        cplx term = std::exp(2.0 * kPi * kI * lin + kPi * kI * quad);
        out.value += term;
        if (maxabs == radius) out.error_estimate += std::abs(term);
        size_t idx = 0;
        while (idx < g && ++n[idx] > radius) n[idx++] = -radius;
        if (idx == g) break;
    }
    // The shell sum bounds the next omitted shell up to a modest geometric factor.
    out.error_estimate *= 2.0;
    return out;
}

LatticeParams LatticeParams::create(cplx omega1, cplx omega3) {
    if (omega1 == cplx(0.0, 0.0)) throw std::invalid_argument("omega1 must be nonzero");
    LatticeParams l;
    l.omega1 = omega1;
    l.omega3 = omega3;
    l.tau = omega3 / omega1;
    if (l.tau.imag() <= 0.0) throw std::invalid_argument("Im(omega3/omega1) must be positive");
    auto th0 = theta1_derivs(0.0, l.tau, 3);
    l.eta1 = -kPi * kPi / (12.0 * omega1) * th0[3] / th0[1];
    l.eta3 = (l.eta1 * omega3 - kI * kPi / 2.0) / omega1;  // Legendre relation
    l.e1 = wp_from_theta(l, omega1);
    l.e2 = wp_from_theta(l, omega1 + omega3);
    l.e3 = wp_from_theta(l, omega3);
    l.g2 = 2.0 * (l.e1 * l.e1 + l.e2 * l.e2 + l.e3 * l.e3);
    l.g3 = 4.0 * l.e1 * l.e2 * l.e3;
    return l;
}

cplx wp(const LatticeParams& l, cplx u) {
    auto r = reduce_to_cell(l, u);
    require_not_lattice_point(l, r.u0);
    return wp_from_theta(l, r.u0);
}

cplx wp_prime(const LatticeParams& l, cplx u) {
    auto r = reduce_to_cell(l, u);
    require_not_lattice_point(l, r.u0);
    return wp_prime_from_theta(l, r.u0);
}

cplx wzeta(const LatticeParams& l, cplx u) {
    auto r = reduce_to_cell(l, u);
    require_not_lattice_point(l, r.u0);
    cplx w = half_arg(l, r.u0);
    auto th = theta1_derivs(w, l.tau, 1);
    cplx base = l.eta1 * r.u0 / l.omega1 + kPi / (2.0 * l.omega1) * th[1] / th[0];
    return base + 2.0 * static_cast<double>(r.m) * l.eta1 + 2.0 * static_cast<double>(r.n) * l.eta3;
}

cplx wsigma(const LatticeParams& l, cplx u) {
    auto r = reduce_to_cell(l, u);
    cplx w = half_arg(l, r.u0);
    auto th = theta1_derivs(w, l.tau, 0);
    auto th0 = theta1_derivs(0.0, l.tau, 1);
    cplx base = 2.0 * l.omega1 / (kPi * th0[1]) *
                std::exp(l.eta1 * r.u0 * r.u0 / (2.0 * l.omega1)) * th[0];
    double mn = static_cast<double>(r.m), nn = static_cast<double>(r.n);
    cplx eta_shift = 2.0 * mn * l.eta1 + 2.0 * nn * l.eta3;
    double parity = ((r.m + r.n + r.m * r.n) % 2 == 0) ? 1.0 : -1.0;
    return parity * base *
           std::exp(eta_shift * (r.u0 + mn * l.omega1 + nn * l.omega3));
}

WeierstrassValues weierstrass(const LatticeParams& l, cplx u) {
    return {wp(l, u), wp_prime(l, u), wzeta(l, u), wsigma(l, u)};
}

std::vector<cplx> wp_derivatives(const LatticeParams& l, cplx u, int kmax) {
    cplx p = wp(l, u), q = wp_prime(l, u);
    // d^k wp as a polynomial in (p, q) with dp = q, dq = 6 p^2 - g2/2.
    using Key = std::pair<int, int>;
    std::map<Key, cplx> poly{{{1, 0}, 1.0}};
    std::vector<cplx> out;
    for (int k = 0; k <= kmax; ++k) {
        cplx val = 0.0;
        for (auto& [key, coef] : poly) {
            cplx t = coef;
            for (int i = 0; i < key.first; ++i) t *= p;
            for (int j = 0; j < key.second; ++j) t *= q;
            val += t;
        }
        out.push_back(val);
        std::map<Key, cplx> next;
        for (auto& [key, coef] : poly) {
            auto [i, j] = key;
            if (i > 0) next[{i - 1, j + 1}] += coef * static_cast<double>(i);
            if (j > 0) {
                next[{i + 2, j - 1}] += 6.0 * coef * static_cast<double>(j);
                next[{i, j - 1}] += -0.5 * l.g2 * coef * static_cast<double>(j);
            }
        }
        poly = std::move(next);
    }
    return out;
}

cplx wp_inverse(const LatticeParams& l, cplx w, int sheet_sign) {
    // Coarse scan of the fundamental cell, then Newton.
    cplx best = 0.0;
    double best_err = std::numeric_limits<double>::infinity();
    const int N = 48;
    for (int i = 1; i < N; ++i) {
        for (int j = 1; j < N; ++j) {
            cplx b = (static_cast<double>(i) / N) * 2.0 * l.omega1 +
                     (static_cast<double>(j) / N) * 2.0 * l.omega3;
            double err = std::abs(wp_from_theta(l, b) - w);
            if (err < best_err) {
                best_err = err;
                best = b;
            }
        }
    }
    cplx b = best;
    bool converged = false;
    for (int it = 0; it < 80; ++it) {
        cplx f = wp_from_theta(l, b) - w;
        if (std::abs(f) <= 1e-13 * (1.0 + std::abs(w))) {
            converged = true;
            break;
        }
        cplx dp = wp_prime_from_theta(l, b);
        if (std::abs(dp) < 1e-14) {
            b += 1e-6 * lattice_scale(l);  // nudge off a critical point
            continue;
        }
        b -= f / dp;
    }
    if (!converged) throw std::runtime_error("wp_inverse: Newton did not converge");
    auto red = reduce_to_cell(l, b);
    b = red.u0;
    cplx dp = wp_prime_from_theta(l, b);
    bool principal = dp.imag() > 1e-12 || (std::abs(dp.imag()) <= 1e-12 && dp.real() >= 0.0);
    if (!principal) b = reduce_to_cell(l, -b).u0;
    if (sheet_sign < 0) b = reduce_to_cell(l, -b).u0;
    return b;
}

cplx wp_inverse_matching(const LatticeParams& l, cplx w, cplx desired_dp) {
    cplx b = wp_inverse(l, w, 1);
    cplx dp = wp_prime(l, b);
    if (std::abs(dp - desired_dp) <= std::abs(-dp - desired_dp)) return b;
    return reduce_to_cell(l, -b).u0;
}

cplx LameScenario::V(double x) const { return 2.0 * wp(lattice, cplx(x, 0.0) + shift); }

NumericPotentialSample LameScenario::sample(double x, int kmax) const {
    NumericPotentialSample s;
    s.x = x;
    auto d = wp_derivatives(lattice, cplx(x, 0.0) + shift, kmax);
    s.v.resize(d.size());
    for (size_t k = 0; k < d.size(); ++k) s.v[k] = 2.0 * d[k];
    return s;
}

LameScenario lame_scenario(cplx omega1, cplx omega3, LameVariant variant,
                           std::optional<cplx> shift) {
    LameScenario s;
    s.variant = variant;
    if (variant == LameVariant::conjugate_pair) {
        omega3 = std::conj(omega1);
        if ((omega1 + omega3).real() <= 0.0)
            throw std::invalid_argument("conjugate-pair scenario needs a positive real period");
    }
    s.lattice = LatticeParams::create(omega1, omega3);
    const auto& l = s.lattice;
    s.E = {-l.e1, -l.e2, -l.e3};
    if (variant == LameVariant::standard) {
        s.shift = shift.value_or(omega3);
        if (std::abs(omega1.imag()) > 1e-12 * std::abs(omega1))
            throw std::invalid_argument("standard scenario needs a real half-period omega1");
        s.period = 2.0 * omega1.real();
        s.lambda1_expected = l.eta1 / l.omega1;
    } else {
        double strip = 2.0 * std::abs(omega1.imag());
        s.shift = shift.value_or(cplx(0.0, 0.5 * strip));
        if (!(s.shift.imag() > 0.0 && s.shift.imag() < strip))
            throw std::invalid_argument("shift must satisfy 0 < Im(a) < 2|Im(omega1)|");
        cplx omega2 = omega1 + omega3;
        s.period = 2.0 * omega2.real();
        s.lambda1_expected = wzeta(l, omega2) / omega2;
    }
    s.mean_V_expected = -2.0 * s.lambda1_expected;
    // The potential must be pole-free on the real line.
    for (double x : {0.0, 0.37, 1.11, 2.71}) (void)s.V(x);
    return s;
}

CheckReport its_matveev_genus1_check(const LameScenario& s, std::span<const double> xs) {
    CheckReport rep;
    const auto& l = s.lattice;
    for (double x : xs) {
        cplx lhs = 2.0 * wp(l, cplx(x, 0.0) + l.omega3);
        cplx v = 0.5 + x / (2.0 * l.omega1);
        auto th = theta_genus1_derivs(v, l.tau);
        cplx ltpp = th[2] / th[0] - (th[1] / th[0]) * (th[1] / th[0]);
        cplx rhs = -2.0 * ltpp / (4.0 * l.omega1 * l.omega1) - 2.0 * l.eta1 / l.omega1;
        double res = std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
        rep.max_residual = std::max(rep.max_residual, res);
        ++rep.samples;
    }
    return rep;
}

CheckReport neumann_nu_check(const LameScenario& s, std::span<const double> xs) {
    CheckReport rep;
    const auto& l = s.lattice;
    static const DiffPoly H2 = build_H(1);
    std::vector<cplx> c0 = {cplx(0.0, 0.0)};
    for (double x : xs) {
        auto smp = s.sample(x, 2);
        cplx a0 = H2.z_coefficient(0).evaluate(smp, 0.0, c0);
        cplx a1 = H2.z_coefficient(1).evaluate(smp, 0.0, c0);
        cplx disc = std::sqrt(a1 * a1 - 4.0 * a0);
        cplx r0 = (-a1 - disc) / 2.0, r1 = (-a1 + disc) / 2.0;
        cplx p = wp(l, cplx(x, 0.0) + s.shift);
        cplx rad = std::sqrt(l.g2 - 3.0 * p * p);
        cplx nu0 = (p - rad) / 2.0, nu1 = (p + rad) / 2.0;
        double m1 = std::max(std::abs(r0 - nu0), std::abs(r1 - nu1));
        double m2 = std::max(std::abs(r0 - nu1), std::abs(r1 - nu0));
        double res = std::min(m1, m2);
        // Coefficient identities: sum and product of the roots.
        res = std::max(res, std::abs(nu0 + nu1 - p));
        res = std::max(res, std::abs(nu0 * nu1 - (p * p - l.g2 / 4.0)));
        rep.max_residual = std::max(rep.max_residual, res);
        ++rep.samples;
    }
    return rep;
}

}  // namespace kdvspec
