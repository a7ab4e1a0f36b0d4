#include "kdvspec/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace kdvspec {

namespace {

// Kronrod 15-point nodes on [0,1] (positive half) with K15 and embedded G7
// weights; zero G7 weight marks Kronrod-only nodes.
struct NodeRow {
    double x, g7, k15;
};
constexpr NodeRow kNodes[8] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

struct Panel {
    double a, b;
    cplx value;
    double error;
};

Panel evaluate_panel(const std::function<cplx(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    cplx g7 = kNodes[0].g7 * f(mid);
    cplx k15 = kNodes[0].k15 * f(mid);
    for (int i = 1; i < 8; ++i) {
        cplx s = f(mid + half * kNodes[i].x) + f(mid - half * kNodes[i].x);
        k15 += kNodes[i].k15 * s;
        if (kNodes[i].g7 != 0.0) g7 += kNodes[i].g7 * s;
    }
    g7 *= half;
    k15 *= half;
    return {a, b, k15, std::abs(k15 - g7)};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<cplx(double)>& f, double a,
                                    double b, double abs_tol, int max_intervals) {
    QuadratureResult out;
    auto cmp = [](const Panel& p, const Panel& q) { return p.error < q.error; };
    std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);
    heap.push(evaluate_panel(f, a, b));
    out.evaluations = 15;
    double total_err = heap.top().error;
    cplx total = heap.top().value;
    int n = 1;
    while (total_err > abs_tol && n < max_intervals) {
        Panel worst = heap.top();
        heap.pop();
        double m = 0.5 * (worst.a + worst.b);
        if (m <= worst.a || m >= worst.b) {  // interval exhausted in double precision
            heap.push(worst);
            break;
        }
        Panel left = evaluate_panel(f, worst.a, m);
        Panel right = evaluate_panel(f, m, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++n;
    }
    out.value = total;
    out.error = total_err;
    out.converged = total_err <= abs_tol;
    return out;
}

QuadratureResult integrate_segment(const std::function<cplx(cplx)>& f, cplx z0, cplx z1,
                                   double abs_tol) {
    cplx d = z1 - z0;
    return integrate_adaptive([&](double t) { return f(z0 + t * d) * d; }, 0.0, 1.0,
                              abs_tol);
}

QuadratureResult integrate_segment_endpoint_sqrt(const std::function<cplx(cplx)>& f,
                                                 cplx z0, cplx z1, bool sing0, bool sing1,
                                                 double abs_tol) {
    constexpr double kPi = 3.141592653589793238462643383279502884;
    cplx d = z1 - z0;
    if (sing0 && sing1) {
        // z = mid - half cos(theta): both endpoint singularities regularized.
        cplx mid = 0.5 * (z0 + z1), half = 0.5 * d;
        return integrate_adaptive(
            [&](double th) {
                return f(mid - half * std::cos(th)) * half * std::sin(th);
            },
            0.0, kPi, abs_tol);
    }
    if (sing0 || sing1) {
        // t = sin^2(theta/2) walks from the singular end with quadratic speed.
        // With z = z0 + t d (or z1 - t d) and t = sin^2(theta/2), the factor
        // f * d * (dt/dtheta) integrates to the z0 -> z1 line integral in
        // either orientation.
        return integrate_adaptive(
            [&](double th) {
                double t = 0.5 * (1.0 - std::cos(th));
                double w = 0.5 * std::sin(th);
                cplx z = sing0 ? z0 + t * d : z1 - t * d;
                return f(z) * d * w;
            },
            0.0, kPi, abs_tol);
    }
    return integrate_segment(f, z0, z1, abs_tol);
}

cplx kronrod15_segment_ordered(const std::function<cplx(cplx)>& f, cplx z0, cplx z1,
                               double* err_est) {
    struct N {
        double x, g7, k15;
    };
    static const std::vector<N> ordered = [] {
        std::vector<N> v;
        for (const auto& row : kNodes) {
            v.push_back({row.x, row.g7, row.k15});
            if (row.x != 0.0) v.push_back({-row.x, row.g7, row.k15});
        }
        std::sort(v.begin(), v.end(), [](const N& a, const N& b) { return a.x < b.x; });
        return v;
    }();
    cplx mid = 0.5 * (z0 + z1), half = 0.5 * (z1 - z0);
    cplx g7 = 0.0, k15 = 0.0;
    for (const N& n : ordered) {
        cplx v = f(mid + half * n.x);
        k15 += n.k15 * v;
        if (n.g7 != 0.0) g7 += n.g7 * v;
    }
    g7 *= half;
    k15 *= half;
    if (err_est) *err_est = std::abs(k15 - g7);
    return k15;
}

}  // namespace kdvspec
