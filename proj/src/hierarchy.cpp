#include "kdvspec/hierarchy.hpp"

#include <cassert>
#include <functional>

namespace kdvspec {

DiffPoly next_f(const DiffPoly& prev, int level) {
    DiffPoly rhs = mpq_class(-1, 4) * prev.dx().dx().dx() +
                   DiffPoly::V() * prev.dx() +
                   mpq_class(1, 2) * DiffPoly::V(1) * prev;
    return rhs.integrate_x() + DiffPoly::c(level);
}

std::vector<DiffPoly> f_sequence(int lmax) {
    std::vector<DiffPoly> f;
    f.push_back(DiffPoly::constant(1));
    for (int l = 1; l <= lmax; ++l) f.push_back(next_f(f.back(), l));
    return f;
}

DiffPoly homogeneous_f(int l) {
    return f_sequence(l)[l].with_c_zeroed();
}

DiffPoly skdv(int n) {
    return mpq_class(-2) * f_sequence(n + 1)[n + 1].dx();
}

DiffPoly build_F(int n) {
    auto f = f_sequence(n);
    DiffPoly F, zp = DiffPoly::constant(1);
    for (int l = 0; l <= n; ++l) {
        F += f[n - l] * zp;
        zp = zp * DiffPoly::z();
    }
    return F;
}

DiffPoly build_H(int n) {
    DiffPoly F = build_F(n);
    return mpq_class(1, 2) * F.dx().dx() + (DiffPoly::z() - DiffPoly::V()) * F;
}

StationaryIdeal::StationaryIdeal(int n) : n_(n) {
    DiffPoly S = skdv(n);
    int top = 2 * n + 1;
    Monomial lead;
    lead.v.assign(top + 1, 0);
    lead.v[top] = 1;
    mpq_class alpha;
    for (const auto& [m, q] : S.terms()) {
        Monomial key = m;
        key.normalize();
        Monomial ref = lead;
        ref.normalize();
        if (key == ref) alpha = q;
    }
    assert(alpha != 0);
    DiffPoly vtop = DiffPoly::V(top);
    repl_.resize(top + 1);
    repl_[top] = vtop - (mpq_class(1) / alpha) * S;
}

const DiffPoly& StationaryIdeal::replacement(int j) const {
    assert(j >= 2 * n_ + 1);
    while (static_cast<int>(repl_.size()) <= j) {
        DiffPoly next = reduce(repl_.back().dx());
        repl_.push_back(std::move(next));
    }
    return repl_[j];
}

DiffPoly StationaryIdeal::reduce(const DiffPoly& p) const {
    int top = 2 * n_ + 1;
    DiffPoly cur = p;
    for (;;) {
        const Monomial* bad = nullptr;
        mpq_class coeff;
        for (const auto& [m, q] : cur.terms()) {
            if (m.max_v_order() >= top) {
                bad = &m;
                coeff = q;
                break;
            }
        }
        if (!bad) return cur;
        int j = bad->max_v_order();
        Monomial rest = *bad;
        rest.v[j] -= 1;
        rest.normalize();
        DiffPoly term;
        term.add_term(*bad, coeff);
        DiffPoly restp;
        restp.add_term(rest, coeff);
        cur -= term;
        cur += restp * replacement(j);
    }
}

IdentityReport verify_core_identities(int n) {
    if (n < 0 || n > 4) throw std::invalid_argument("symbolic hierarchy is capped at order 4");
    IdentityReport rep;
    StationaryIdeal ideal(n);
    DiffPoly F = build_F(n);
    DiffPoly V = DiffPoly::V(), z = DiffPoly::z();
    DiffPoly Fx = F.dx(), Fxx = Fx.dx();

    DiffPoly res1 = ideal.reduce(Fxx.dx() - mpq_class(4) * (V - z) * Fx -
                                 mpq_class(2) * V.dx() * F);
    rep.recursion_ok = res1.is_zero();
    if (!rep.recursion_ok) rep.residual = res1;

    DiffPoly P = mpq_class(1, 2) * Fxx * F - mpq_class(1, 4) * Fx * Fx - (V - z) * F * F;
    DiffPoly res2 = ideal.reduce(P.dx());
    rep.first_integral_ok = res2.is_zero();
    if (rep.first_integral_ok) {
        rep.curve_poly = ideal.reduce(P);
        // Monic of degree 2n+1 in z.
        DiffPoly top = rep.curve_poly.z_coefficient(2 * n + 1);
        rep.first_integral_ok = rep.curve_poly.z_degree() == 2 * n + 1 &&
                                top == DiffPoly::constant(1);
    } else if (rep.residual.is_zero()) {
        rep.residual = res2;
    }

    DiffPoly H = build_H(n);
    DiffPoly res3 = P + mpq_class(1, 4) * Fx * Fx - F * H;
    rep.factorization_ok = res3.is_zero();
    if (!rep.factorization_ok && rep.residual.is_zero()) rep.residual = res3;
    return rep;
}

namespace {

// Sum over (j_0,...,j_{2n}) >= 0 with sum k of the closed-form coefficient
// times E_0^{j_0}...E_{2n}^{j_{2n}}.
template <typename Scalar, typename Pow>
Scalar c_from_E_impl(size_t nvars, int k, const Pow& pow_of) {
    std::vector<int> j(nvars, 0);
    Scalar total{};
    // Walk compositions of k into nvars parts.
    std::vector<int> stack;
    std::function<void(size_t, int)> walk = [&](size_t idx, int rem) {
        if (idx + 1 == nvars) {
            j[idx] = rem;
            mpq_class coeff = 1;
            mpz_class num = 1, den = 1;
            for (size_t i = 0; i < nvars; ++i) {
                mpz_class f2j, fj;
                mpz_fac_ui(f2j.get_mpz_t(), 2 * j[i]);
                mpz_fac_ui(fj.get_mpz_t(), j[i]);
                num *= f2j;
                den *= fj * fj * (2 * j[i] - 1);
            }
            mpz_class two2k = 1;
            mpz_mul_2exp(two2k.get_mpz_t(), two2k.get_mpz_t(), 2 * k);
            den *= two2k;
            coeff = mpq_class(num) / mpq_class(den);
            coeff.canonicalize();
            Scalar term = pow_of(j, coeff);
            total += term;
            return;
        }
        for (int v = 0; v <= rem; ++v) {
            j[idx] = v;
            walk(idx + 1, rem - v);
        }
    };
    walk(0, k);
    return -total;
}

}  // namespace

mpq_class c_from_E_exact(std::span<const mpq_class> E, int k) {
    return c_from_E_impl<mpq_class>(E.size(), k, [&](const std::vector<int>& j, const mpq_class& coeff) {
        mpq_class t = coeff;
        for (size_t i = 0; i < E.size(); ++i)
            for (int e = 0; e < j[i]; ++e) t *= E[i];
        return t;
    });
}

cplx c_from_E(std::span<const cplx> E, int k) {
    return c_from_E_impl<cplx>(E.size(), k, [&](const std::vector<int>& j, const mpq_class& coeff) {
        cplx t = mpq_get_d(coeff.get_mpq_t());
        for (size_t i = 0; i < E.size(); ++i)
            for (int e = 0; e < j[i]; ++e) t *= E[i];
        return t;
    });
}

std::vector<DiffPoly> c_matching_polynomials(int n) {
    if (n < 1 || n > 4) throw std::invalid_argument("symbolic hierarchy is capped at order 4");
    StationaryIdeal ideal(n);
    DiffPoly F = build_F(n);
    DiffPoly V = DiffPoly::V(), z = DiffPoly::z();
    DiffPoly Fx = F.dx();
    DiffPoly P = mpq_class(1, 2) * Fx.dx() * F - mpq_class(1, 4) * Fx * Fx - (V - z) * F * F;
    P = ideal.reduce(P);
    std::vector<DiffPoly> out;
    for (int k = 1; k <= n; ++k) {
        DiffPoly coeff = P.z_coefficient(2 * n + 1 - k);
        if (coeff.max_v_order() >= 0)
            throw std::runtime_error("curve coefficient not V-free after reduction");
        out.push_back(coeff);
    }
    return out;
}

}  // namespace kdvspec
