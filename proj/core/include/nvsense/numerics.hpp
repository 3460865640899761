#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <queue>
#include <vector>

#include "nvsense/errors.hpp"

namespace nvsense::numerics {

// 15-point Kronrod extension of 7-point Gauss (QUADPACK constants).
namespace gk15 {
inline constexpr double node[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};
}  // namespace gk15

struct PanelEstimate {
    double integral = 0.0;
    double error = 0.0;
};

/// One Gauss-Kronrod panel over [a, b]. Never evaluates f at the endpoints.
template <class F>
PanelEstimate gk15_panel(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double ik = 0.0;
    double ig = 0.0;
    for (int i = 0; i < 8; ++i) {
        if (i == 7) {
            const double fc = f(c);
            ik += gk15::wk[7] * fc;
            ig += gk15::wg[3] * fc;
            break;
        }
        const double fl = f(c - h * gk15::node[i]);
        const double fr = f(c + h * gk15::node[i]);
        ik += gk15::wk[i] * (fl + fr);
        if (i % 2 == 1) ig += gk15::wg[i / 2] * (fl + fr);
    }
    PanelEstimate est;
    est.integral = ik * h;
    est.error = std::abs((ik - ig) * h);
    return est;
}

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-30;
    int max_panels = 20000;
};

/// Globally adaptive quadrature: repeatedly bisects the panel with the
/// largest error estimate until sum(err) <= max(abs_tol, rel_tol*|I|).
template <class F>
double integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
    if (a == b) return 0.0;
    struct Panel {
        double a, b, integral, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    std::priority_queue<Panel> heap;
    PanelEstimate first = gk15_panel(f, a, b);
    heap.push({a, b, first.integral, first.error});
    double total = first.integral;
    double total_err = first.error;
    int n_panels = 1;
    while (total_err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
        if (n_panels >= opts.max_panels) {
#ifdef NVSENSE_QUAD_DEBUG
            std::fprintf(stderr, "quad fail: [%g, %g] total=%g err=%g tol=%g panels=%d\n", a, b,
                         total, total_err, std::max(opts.abs_tol, opts.rel_tol * std::abs(total)),
                         n_panels);
#endif
            throw QuadratureError("adaptive quadrature: panel budget exhausted before tolerance");
        }
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Interval at floating-point resolution; keep its estimate as is.
            if (heap.empty()) break;
            Panel next = heap.top();
            heap.pop();
            total_err -= next.error;  // freeze 'worst', retry on next
            next.error = 0.0;
            heap.push(worst);
            heap.push(next);
            continue;
        }
        PanelEstimate left = gk15_panel(f, worst.a, mid);
        PanelEstimate right = gk15_panel(f, mid, worst.b);
        total += left.integral + right.integral - worst.integral;
        total_err += left.error + right.error - worst.error;
        heap.push({worst.a, mid, left.integral, left.error});
        heap.push({mid, worst.b, right.integral, right.error});
        ++n_panels;
        if (!std::isfinite(total)) {
            throw QuadratureError("adaptive quadrature: integrand not finite");
        }
    }
    return total;
}

struct RootOptions {
    double x_tol = 1e-15;   ///< relative width of the final bracket
    double f_tol = 0.0;     ///< stop early when |f| <= f_tol
    int max_iter = 200;
};

struct RootResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Bisection with secant acceleration inside a maintained bracket.
/// Requires f(a) and f(b) of opposite sign (zero endpoints are accepted).
template <class F>
RootResult find_root(F&& f, double a, double b, double fa, double fb,
                     const RootOptions& opts = {}) {
    RootResult res;
    if (fa == 0.0) return {a, 0.0, 0, true};
    if (fb == 0.0) return {b, 0.0, 0, true};
    if ((fa > 0) == (fb > 0)) {
        throw NoBracketError("find_root: endpoints do not bracket a sign change");
    }
    double x_prev = a, f_prev = fa;
    double x_cur = b, f_cur = fb;
    for (int it = 0; it < opts.max_iter; ++it) {
        res.iterations = it + 1;
        double x_next;
        const double width = b - a;
        // Secant proposal from the two most recent points, clipped to the bracket.
        const double df = f_cur - f_prev;
        if (df != 0.0) {
            x_next = x_cur - f_cur * (x_cur - x_prev) / df;
            if (!(x_next > a + 0.01 * width && x_next < b - 0.01 * width)) {
                x_next = 0.5 * (a + b);
            }
        } else {
            x_next = 0.5 * (a + b);
        }
        const double f_next = f(x_next);
        x_prev = x_cur;
        f_prev = f_cur;
        x_cur = x_next;
        f_cur = f_next;
        if (f_next == 0.0 || std::abs(f_next) <= opts.f_tol) {
            res.x = x_next;
            res.fx = f_next;
            res.converged = true;
            return res;
        }
        if ((f_next > 0) == (fb > 0)) {
            b = x_next;
            fb = f_next;
        } else {
            a = x_next;
            fa = f_next;
        }
        if (b - a <= opts.x_tol * std::max({1.0, std::abs(a), std::abs(b)})) {
            res.x = std::abs(fa) < std::abs(fb) ? a : b;
            res.fx = std::abs(fa) < std::abs(fb) ? fa : fb;
            res.converged = true;
            return res;
        }
    }
    res.x = std::abs(fa) < std::abs(fb) ? a : b;
    res.fx = std::abs(fa) < std::abs(fb) ? fa : fb;
    res.converged = false;
    return res;
}

/// log(1 + exp(-x)) without overflow for any x.
inline double softplus_neg(double x) {
    if (x > 0.0) return std::log1p(std::exp(-x));
    return -x + std::log1p(std::exp(x));
}

}  // namespace nvsense::numerics
