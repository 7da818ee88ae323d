#include "robrenyi/solve.hpp"

#include <algorithm>
#include <limits>

namespace robrenyi::solve {

RootResult safeguarded_newton(
    const std::function<std::pair<double, double>(double)>& g_and_dg, double lo,
    double hi, double x0, double x_tol, double g_tol, int max_iter) {
    auto [glo, dglo] = g_and_dg(lo);
    auto [ghi, dghi] = g_and_dg(hi);
    RootResult out;
    if (glo == 0.0) return {lo, 0.0, 0, true};
    if (ghi == 0.0) return {hi, 0.0, 0, true};
    if (!std::isfinite(glo) || !std::isfinite(ghi) || glo * ghi > 0.0) {
        out.x = x0;
        return out;  // not bracketed
    }
    double xl = lo, xh = hi;
    if (glo > 0.0) std::swap(xl, xh);

    double x = std::clamp(x0, std::min(lo, hi), std::max(lo, hi));
    double dx_old = std::abs(hi - lo);
    double dx = dx_old;
    auto [g, dg] = g_and_dg(x);
    for (int it = 1; it <= max_iter; ++it) {
        const bool newton_ok =
            std::isfinite(g) && std::isfinite(dg) && dg != 0.0 &&
            ((x - xh) * dg - g) * ((x - xl) * dg - g) < 0.0 &&
            std::abs(2.0 * g) <= std::abs(dx_old * dg);
        dx_old = dx;
        if (newton_ok) {
            dx = g / dg;
            x -= dx;
        } else {
            dx = 0.5 * (xh - xl);
            x = xl + dx;
        }
        std::tie(g, dg) = g_and_dg(x);
        if (std::isfinite(g)) {
            if (g < 0.0)
                xl = x;
            else
                xh = x;
        }
        if (std::abs(dx) < x_tol && std::abs(g) < g_tol) {
            return {x, g, it, true};
        }
    }
    out.x = x;
    out.g = g;
    out.iterations = max_iter;
    out.converged = std::abs(g) < g_tol;
    return out;
}

RootResult brent_root(const std::function<double(double)>& g, double lo,
                      double hi, double x_tol, int max_iter) {
    const double eps = std::numeric_limits<double>::epsilon();
    double a = lo, b = hi;
    double fa = g(a), fb = g(b);
    RootResult out;
    if (fa == 0.0) return {a, 0.0, 0, true};
    if (fb == 0.0) return {b, 0.0, 0, true};
    if (!std::isfinite(fa) || !std::isfinite(fb) || fa * fb > 0.0) {
        out.x = 0.5 * (a + b);
        return out;
    }
    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int it = 1; it <= max_iter; ++it) {
        if (fb * fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double xm = 0.5 * (c - b);
        const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * x_tol;
        if (std::abs(xm) <= tol1 || fb == 0.0) return {b, fb, it, true};
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q),
                                   std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol1 ? d : std::copysign(tol1, xm);
        fb = g(b);
    }
    out.x = b;
    out.g = fb;
    out.iterations = max_iter;
    return out;
}

std::optional<std::pair<double, double>> bracket_root(
    const std::function<double(double)>& g, double x0, double limit_lo,
    double limit_hi, double initial_step, int max_expansions) {
    double lo = std::max(x0 - initial_step, limit_lo);
    double hi = std::min(x0 + initial_step, limit_hi);
    double glo = g(lo), ghi = g(hi);
    for (int it = 0; it < max_expansions; ++it) {
        if (std::isfinite(glo) && std::isfinite(ghi) && glo * ghi <= 0.0)
            return std::make_pair(lo, hi);
        const double width = hi - lo;
        bool grew = false;
        if (lo > limit_lo) {
            lo = std::max(lo - width, limit_lo);
            glo = g(lo);
            grew = true;
        }
        if (hi < limit_hi) {
            hi = std::min(hi + width, limit_hi);
            ghi = g(hi);
            grew = true;
        }
        if (!grew) break;
    }
    if (std::isfinite(glo) && std::isfinite(ghi) && glo * ghi <= 0.0)
        return std::make_pair(lo, hi);
    return std::nullopt;
}

MinimizeResult golden_section_minimize(const std::function<double(double)>& f,
                                       double a, double b, double x_tol,
                                       int max_iter) {
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    int it = 0;
    while (b - a > x_tol && it < max_iter) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1; f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2; f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        ++it;
    }
    const double xm = 0.5 * (a + b);
    return {xm, f(xm), it};
}

} // namespace robrenyi::solve
