#include "kdvspec/diffpoly.hpp"

#include <algorithm>
#include <sstream>

namespace kdvspec {

void Monomial::normalize() {
    while (!v.empty() && v.back() == 0) v.pop_back();
    while (!c.empty() && c.back() == 0) c.pop_back();
}

int Monomial::max_v_order() const {
    for (int k = static_cast<int>(v.size()) - 1; k >= 0; --k)
        if (v[k] > 0) return k;
    return -1;
}

DiffPoly DiffPoly::constant(const Coeff& q) {
    DiffPoly p;
    p.add_term(Monomial{}, q);
    return p;
}

DiffPoly DiffPoly::V(int order) {
    Monomial m;
    m.v.assign(order + 1, 0);
    m.v[order] = 1;
    DiffPoly p;
    p.add_term(m, 1);
    return p;
}

DiffPoly DiffPoly::z() {
    Monomial m;
    m.z = 1;
    DiffPoly p;
    p.add_term(m, 1);
    return p;
}

DiffPoly DiffPoly::c(int k) {
    Monomial m;
    m.c.assign(k, 0);
    m.c[k - 1] = 1;
    DiffPoly p;
    p.add_term(m, 1);
    return p;
}

void DiffPoly::add_term(const Monomial& m, const Coeff& q) {
    if (q == 0) return;
    Monomial key = m;
    key.normalize();
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(std::move(key), q);
    } else {
        it->second += q;
        if (it->second == 0) terms_.erase(it);
    }
}

DiffPoly& DiffPoly::operator+=(const DiffPoly& o) {
    for (const auto& [m, q] : o.terms_) add_term(m, q);
    return *this;
}

DiffPoly& DiffPoly::operator-=(const DiffPoly& o) {
    for (const auto& [m, q] : o.terms_) add_term(m, -q);
    return *this;
}

DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
    DiffPoly r;
    for (const auto& [ma, qa] : a.terms_) {
        for (const auto& [mb, qb] : b.terms_) {
            Monomial m;
            m.v.assign(std::max(ma.v.size(), mb.v.size()), 0);
            for (size_t k = 0; k < ma.v.size(); ++k) m.v[k] += ma.v[k];
            for (size_t k = 0; k < mb.v.size(); ++k) m.v[k] += mb.v[k];
            m.z = ma.z + mb.z;
            m.c.assign(std::max(ma.c.size(), mb.c.size()), 0);
            for (size_t k = 0; k < ma.c.size(); ++k) m.c[k] += ma.c[k];
            for (size_t k = 0; k < mb.c.size(); ++k) m.c[k] += mb.c[k];
            r.add_term(m, qa * qb);
        }
    }
    return r;
}

DiffPoly operator*(const DiffPoly::Coeff& q, const DiffPoly& p) {
    DiffPoly r;
    if (q == 0) return r;
    for (const auto& [m, qq] : p.terms_) r.add_term(m, q * qq);
    return r;
}

DiffPoly DiffPoly::dx() const {
    DiffPoly r;
    for (const auto& [m, q] : terms_) {
        for (size_t k = 0; k < m.v.size(); ++k) {
            if (m.v[k] == 0) continue;
            Monomial b = m;
            b.v[k] -= 1;
            if (b.v.size() < k + 2) b.v.resize(k + 2, 0);
            b.v[k + 1] += 1;
            r.add_term(b, q * static_cast<int>(m.v[k]));
        }
    }
    return r;
}

namespace {

// Ordering used by antidifferentiation: compare derivative structure from the
// highest order downward, so the image of "bump the top factor" is maximal.
bool integ_less(const Monomial& a, const Monomial& b) {
    size_t n = std::max(a.v.size(), b.v.size());
    for (size_t i = n; i-- > 0;) {
        uint8_t ea = i < a.v.size() ? a.v[i] : 0;
        uint8_t eb = i < b.v.size() ? b.v[i] : 0;
        if (ea != eb) return ea < eb;
    }
    if (a.z != b.z) return a.z < b.z;
    return a.c < b.c;
}

}  // namespace

DiffPoly DiffPoly::integrate_x() const {
    DiffPoly rem = *this, result;
    while (!rem.terms_.empty()) {
        auto lead = rem.terms_.begin();
        for (auto it = std::next(rem.terms_.begin()); it != rem.terms_.end(); ++it)
            if (integ_less(lead->first, it->first)) lead = it;
        const Monomial& t = lead->first;
        int m = t.max_v_order();
        // In an exact derivative the leading term is the image of bumping the
        // top factor of its antiderivative monomial, so the top factor must be
        // simple and of positive order.
        if (m <= 0 || t.v[m] != 1)
            throw IntegrationError("not an exact x-derivative: leading term " +
                                   [&] { DiffPoly p; p.add_term(t, lead->second); return p.text(); }());
        Monomial u = t;
        u.v[m] -= 1;
        u.v[m - 1] += 1;
        u.normalize();
        Coeff cu = lead->second / static_cast<int>(u.v[m - 1]);
        DiffPoly piece;
        piece.add_term(u, cu);
        result += piece;
        rem -= piece.dx();
    }
    return result;
}

DiffPoly DiffPoly::with_c_zeroed() const {
    DiffPoly r;
    for (const auto& [m, q] : terms_) {
        if (!m.c.empty()) continue;
        r.add_term(m, q);
    }
    return r;
}

DiffPoly DiffPoly::with_c_values(std::span<const Coeff> cvals) const {
    DiffPoly r;
    for (const auto& [m, q] : terms_) {
        Coeff f = q;
        for (size_t k = 0; k < m.c.size(); ++k) {
            if (m.c[k] == 0) continue;
            if (k >= cvals.size()) throw std::out_of_range("c value missing");
            for (int e = 0; e < m.c[k]; ++e) f *= cvals[k];
        }
        Monomial b = m;
        b.c.clear();
        r.add_term(b, f);
    }
    return r;
}

DiffPoly DiffPoly::with_V_zeroed() const {
    DiffPoly r;
    for (const auto& [m, q] : terms_) {
        if (m.max_v_order() >= 0) continue;
        r.add_term(m, q);
    }
    return r;
}

int DiffPoly::max_v_order() const {
    int r = -1;
    for (const auto& [m, q] : terms_) r = std::max(r, m.max_v_order());
    return r;
}

int DiffPoly::z_degree() const {
    int r = 0;
    for (const auto& [m, q] : terms_) r = std::max<int>(r, m.z);
    return r;
}

int DiffPoly::max_c_index() const {
    int r = 0;
    for (const auto& [m, q] : terms_) r = std::max<int>(r, static_cast<int>(m.c.size()));
    return r;
}

DiffPoly DiffPoly::z_coefficient(uint32_t p) const {
    DiffPoly r;
    for (const auto& [m, q] : terms_) {
        if (m.z != p) continue;
        Monomial b = m;
        b.z = 0;
        r.add_term(b, q);
    }
    return r;
}

cplx DiffPoly::evaluate(const NumericPotentialSample& s, cplx zval,
                        std::span<const cplx> cvals) const {
    cplx acc = 0.0;
    for (const auto& [m, q] : terms_) {
        cplx t = mpq_get_d(q.get_mpq_t());
        for (size_t k = 0; k < m.v.size(); ++k) {
            if (m.v[k] == 0) continue;
            if (k >= s.v.size())
                throw std::out_of_range("potential sample lacks derivative order " + std::to_string(k));
            for (int e = 0; e < m.v[k]; ++e) t *= s.v[k];
        }
        for (uint32_t e = 0; e < m.z; ++e) t *= zval;
        for (size_t k = 0; k < m.c.size(); ++k) {
            if (m.c[k] == 0) continue;
            if (k >= cvals.size()) throw std::out_of_range("c value missing");
            for (int e = 0; e < m.c[k]; ++e) t *= cvals[k];
        }
        acc += t;
    }
    return acc;
}

namespace {

std::string v_name(size_t k, bool latex) {
    if (k == 0) return "V";
    std::string sub(k, 'x');
    return latex ? "V_{" + sub + "}" : "V_" + sub;
}

void append_power(std::string& out, const std::string& base, int e, bool latex) {
    if (!out.empty()) out += latex ? " " : "*";
    out += base;
    if (e > 1) out += latex ? "^{" + std::to_string(e) + "}" : "^" + std::to_string(e);
}

std::string monomial_str(const Monomial& m, bool latex) {
    std::string out;
    for (size_t k = 0; k < m.c.size(); ++k)
        if (m.c[k]) append_power(out, latex ? "c_{" + std::to_string(k + 1) + "}" : "c" + std::to_string(k + 1),
                                 m.c[k], latex);
    if (m.z) append_power(out, "z", m.z, latex);
    for (size_t k = 0; k < m.v.size(); ++k)
        if (m.v[k]) append_power(out, v_name(k, latex), m.v[k], latex);
    return out;
}

// Emission order: z-degree descending, then V-structure from the top order
// down, then constants; deterministic and stable across runs.
bool emit_less(const Monomial& a, const Monomial& b) {
    if (a.z != b.z) return a.z > b.z;
    size_t n = std::max(a.v.size(), b.v.size());
    for (size_t i = n; i-- > 0;) {
        uint8_t ea = i < a.v.size() ? a.v[i] : 0;
        uint8_t eb = i < b.v.size() ? b.v[i] : 0;
        if (ea != eb) return ea > eb;
    }
    return a.c < b.c;
}

std::string emit(const DiffPoly::TermMap& terms, bool latex) {
    if (terms.empty()) return "0";
    std::vector<const std::pair<const Monomial, mpq_class>*> order;
    order.reserve(terms.size());
    for (const auto& t : terms) order.push_back(&t);
    std::sort(order.begin(), order.end(),
              [&](auto* x, auto* y) { return emit_less(x->first, y->first); });
    std::ostringstream os;
    bool first = true;
    for (auto* t : order) {
        mpq_class q = t->second;
        bool neg = q < 0;
        if (neg) q = -q;
        if (first) {
            if (neg) os << "-";
            first = false;
        } else {
            os << (neg ? " - " : " + ");
        }
        std::string mono = monomial_str(t->first, latex);
        std::string coeff;
        if (q != 1 || mono.empty()) {
            if (latex && q.get_den() != 1)
                coeff = "\\tfrac{" + q.get_num().get_str() + "}{" + q.get_den().get_str() + "}";
            else
                coeff = q.get_str();
        }
        if (coeff.empty())
            os << mono;
        else if (mono.empty())
            os << coeff;
        else
            os << coeff << (latex ? " " : "*") << mono;
    }
    return os.str();
}

}  // namespace

std::string DiffPoly::text() const { return emit(terms_, false); }
std::string DiffPoly::latex() const { return emit(terms_, true); }

}  // namespace kdvspec
