#include "gl3/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "gl3/util.hpp"

namespace gl3::osc {

PhaseFunction PhaseFunction::negated() const {
    auto f0 = f_[0], f1 = f_[1], f2 = f_[2], f3 = f_[3], f4 = f_[4];
    return PhaseFunction([f0](double t) { return -f0(t); },
                         [f1](double t) { return -f1(t); },
                         [f2](double t) { return -f2(t); },
                         [f3](double t) { return -f3(t); },
                         [f4](double t) { return -f4(t); }, scales_);
}

AmplitudeFunction::AmplitudeFunction(Fn w, double a, double b, Scales sc, Fn d1,
                                     Fn d2)
    : w_(std::move(w)), d1_(std::move(d1)), d2_(std::move(d2)), a_(a), b_(b),
      scales_(sc) {
    if (!(a < b)) throw std::invalid_argument("AmplitudeFunction: need a < b");
}

double AmplitudeFunction::d(int k, double t) const {
    if (k == 0) return (*this)(t);
    if (k == 1 && d1_) return (t <= a_ || t >= b_) ? 0.0 : d1_(t);
    if (k == 2 && d2_) return (t <= a_ || t >= b_) ? 0.0 : d2_(t);
    // central differences at a step tied to the support width
    double eps = (b_ - a_) * 1e-3;
    auto f = [&](double x) { return (*this)(x); };
    switch (k) {
        case 1: return (f(t + eps) - f(t - eps)) / (2 * eps);
        case 2: return (f(t + eps) - 2 * f(t) + f(t - eps)) / (eps * eps);
        case 3:
            eps = (b_ - a_) * 4e-3;
            return (f(t + 2 * eps) - 2 * f(t + eps) + 2 * f(t - eps) - f(t - 2 * eps)) /
                   (2 * eps * eps * eps);
        case 4:
            eps = (b_ - a_) * 8e-3;
            return (f(t + 2 * eps) - 4 * f(t + eps) + 6 * f(t) - 4 * f(t - eps) +
                    f(t - 2 * eps)) /
                   (eps * eps * eps * eps);
        default: throw std::invalid_argument("AmplitudeFunction::d: order > 4");
    }
}

AmplitudeFunction make_amplitude(AmplitudeFunction::Fn w, double a, double b,
                                 AmplitudeFunction::Fn d1,
                                 AmplitudeFunction::Fn d2) {
    AmplitudeFunction amp(std::move(w), a, b, Scales{}, std::move(d1), std::move(d2));
    double maxv = 0.0, maxd[5] = {0, 0, 0, 0, 0};
    const int grid = 512;
    for (int i = 0; i <= grid; ++i) {
        double t = a + (b - a) * i / grid;
        maxv = std::max(maxv, std::abs(amp(t)));
        for (int j = 1; j <= 4; ++j) maxd[j] = std::max(maxd[j], std::abs(amp.d(j, t)));
    }
    double X = std::max(maxv, 1e-300);
    double U = (b - a) / 2.0;
    for (int j = 1; j <= 4; ++j)
        if (maxd[j] > 0)
            U = std::min(U, std::pow(8.0 * X / maxd[j], 1.0 / j));
    return AmplitudeFunction([amp](double t) { return amp(t); }, a, b,
                             Scales{X, 0.0, U, 0.0, 0.0},
                             [amp](double t) { return amp.d(1, t); },
                             [amp](double t) { return amp.d(2, t); });
}

namespace {

// Gauss-Kronrod 7-15 nodes: {abscissa, G7 weight, K15 weight}
constexpr double kGK[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529}};

struct Panel {
    double a, b;
    cdouble val;
    double err;
    double absval;  // K15 of |w|
};

Panel gk15(const AmplitudeFunction& w, const PhaseFunction& h, double a, double b) {
    const double c = 0.5 * (a + b), m = 0.5 * (b - a);
    auto f = [&](double t) -> cdouble {
        double amp = w(t);
        if (amp == 0.0) return {0.0, 0.0};
        double ph = h(t);
        return {amp * std::cos(ph), amp * std::sin(ph)};
    };
    cdouble f0 = f(c);
    cdouble g7 = kGK[0][1] * f0, k15 = kGK[0][2] * f0;
    double a15 = kGK[0][2] * std::abs(w(c));
    for (int i = 1; i < 8; ++i) {
        double dx = m * kGK[i][0];
        cdouble fi = f(c + dx) + f(c - dx);
        g7 += kGK[i][1] * fi;
        k15 += kGK[i][2] * fi;
        a15 += kGK[i][2] * (std::abs(w(c + dx)) + std::abs(w(c - dx)));
    }
    return {a, b, k15 * m, std::abs(k15 - g7) * m, a15 * m};
}

}  // namespace

OscResult osc_quadrature(const AmplitudeFunction& w, const PhaseFunction& h,
                         double tol) {
    if (!(tol > 1e-14 && tol < 1e-2))
        throw std::invalid_argument("osc_quadrature: tol outside (1e-14, 1e-2)");
    const double a = w.a(), b = w.b();
    const double max_step = (b - a) / 8.0;
    const double min_step = (b - a) * 1e-13;

    // panel boundaries bounded by the local oscillation length 2pi/|h'|
    std::vector<Panel> panels;
    double t = a;
    while (t < b) {
        double dt = std::min(max_step, kTwoPi / std::max(1.0, std::abs(h.d(1, t))));
        for (int guard = 0; guard < 60; ++guard) {
            double ahead = std::abs(h.d(1, std::min(b, t + dt)));
            double want = kTwoPi / std::max(1.0, ahead);
            if (dt <= 1.6 * want || dt <= min_step) break;
            dt *= 0.5;
        }
        dt = std::max(dt, min_step);
        double next = std::min(b, t + dt);
        panels.push_back(gk15(w, h, t, next));
        if (panels.size() > (size_t)4e6)
            throw QuadratureError("osc_quadrature: initial panelling exploded");
        t = next;
    }

    auto cmp = [&](size_t i, size_t j) { return panels[i].err < panels[j].err; };
    std::priority_queue<size_t, std::vector<size_t>, decltype(cmp)> worst(cmp);
    double total_err = 0.0, mass = 0.0;
    for (size_t i = 0; i < panels.size(); ++i) {
        total_err += panels[i].err;
        mass += panels[i].absval;
        worst.push(i);
    }
    const double target = tol * std::max(1.0, mass);

    size_t iterations = 0;
    while (total_err > target) {
        if (worst.empty() || panels.size() > (size_t)4e6 || ++iterations > (size_t)4e6)
            throw QuadratureError("osc_quadrature: did not converge to tolerance");
        size_t i = worst.top();
        worst.pop();
        Panel p = panels[i];
        if (p.b - p.a <= min_step)
            throw QuadratureError("osc_quadrature: panel width underflow");
        double mid = 0.5 * (p.a + p.b);
        Panel left = gk15(w, h, p.a, mid);
        Panel right = gk15(w, h, mid, p.b);
        total_err += left.err + right.err - p.err;
        mass += left.absval + right.absval - p.absval;
        panels[i] = left;
        panels.push_back(right);
        worst.push(i);
        worst.push(panels.size() - 1);
    }

    Kahan<cdouble> acc;
    for (const auto& p : panels) acc.add(p.val);
    return {acc.sum(), total_err, Method::Quadrature};
}

std::optional<double> find_stationary_point(const PhaseFunction& h, double a,
                                            double b, int grid,
                                            double* min_abs_deriv) {
    if (grid < 64) grid = 64;
    std::vector<double> d(grid + 1);
    double minabs = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; ++i) {
        double t = a + (b - a) * i / grid;
        d[i] = h.d(1, t);
        minabs = std::min(minabs, std::abs(d[i]));
    }
    int changes = 0, where = -1;
    for (int i = 0; i < grid; ++i) {
        if (d[i] == 0.0 || d[i] * d[i + 1] < 0.0) {
            ++changes;
            where = i;
            if (d[i] == 0.0 && i > 0) --changes;  // grid point zero counted once
        }
    }
    if (changes > 1)
        throw std::runtime_error(
            "find_stationary_point: multiple sign changes of h' (uniqueness violated)");
    if (changes == 0) {
        // certify the floor of |h'| on a denser grid
        for (int i = 0; i <= 4 * grid; ++i) {
            double t = a + (b - a) * i / (4 * grid);
            minabs = std::min(minabs, std::abs(h.d(1, t)));
        }
        if (min_abs_deriv) *min_abs_deriv = minabs;
        return std::nullopt;
    }

    double lo = a + (b - a) * where / grid;
    double hi = a + (b - a) * (where + 1) / grid;
    double flo = h.d(1, lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (b - a); ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = h.d(1, mid);
        if (fm == 0.0) { lo = hi = mid; break; }
        if ((fm < 0) == (flo < 0)) { lo = mid; flo = fm; }
        else hi = mid;
    }
    double t0 = 0.5 * (lo + hi);
    for (int it = 0; it < 8; ++it) {  // Newton polish
        double f1 = h.d(1, t0), f2 = h.d(2, t0);
        if (f2 == 0.0) break;
        double step = f1 / f2;
        double t1 = t0 - step;
        if (t1 <= a || t1 >= b) break;
        t0 = t1;
        if (std::abs(step) < 1e-15 * (b - a)) break;
    }
    if (min_abs_deriv) *min_abs_deriv = 0.0;
    return t0;
}

namespace {

// central-difference even derivative of a complex function, with one
// Richardson step (schemes are second order)
cdouble central_even_deriv(const std::function<cdouble(double)>& g, double t0,
                           int order, double eps) {
    auto stencil = [&](double e) -> cdouble {
        switch (order) {
            case 0: return g(t0);
            case 2: return (g(t0 + e) - 2.0 * g(t0) + g(t0 - e)) / (e * e);
            case 4:
                return (g(t0 + 2 * e) - 4.0 * g(t0 + e) + 6.0 * g(t0) -
                        4.0 * g(t0 - e) + g(t0 - 2 * e)) /
                       (e * e * e * e);
            case 6:
                return (g(t0 + 3 * e) - 6.0 * g(t0 + 2 * e) + 15.0 * g(t0 + e) -
                        20.0 * g(t0) + 15.0 * g(t0 - e) - 6.0 * g(t0 - 2 * e) +
                        g(t0 - 3 * e)) /
                       std::pow(e, 6);
            default: throw std::invalid_argument("central_even_deriv: bad order");
        }
    };
    if (order == 0) return g(t0);
    cdouble d1 = stencil(eps), d2 = stencil(eps * 0.5);
    return (4.0 * d2 - d1) / 3.0;
}

}  // namespace

double fd_richardson_ratio(const std::function<cdouble(double)>& g, double t0,
                           int deriv_order, double eps) {
    auto raw = [&](double e) -> cdouble {
        switch (deriv_order) {
            case 2: return (g(t0 + e) - 2.0 * g(t0) + g(t0 - e)) / (e * e);
            case 4:
                return (g(t0 + 2 * e) - 4.0 * g(t0 + e) + 6.0 * g(t0) -
                        4.0 * g(t0 - e) + g(t0 - 2 * e)) /
                       (e * e * e * e);
            default: throw std::invalid_argument("fd_richardson_ratio: bad order");
        }
    };
    cdouble a = raw(eps), b = raw(eps * 0.5), c = raw(eps * 0.25);
    return std::abs(a - b) / std::abs(b - c);
}

OscResult stationary_phase_eval(const AmplitudeFunction& w, const PhaseFunction& h,
                                int order) {
    if (order < 0 || order > 2)
        throw std::invalid_argument("stationary_phase_eval: order must be 0..2");
    auto t0opt = find_stationary_point(h, w.a(), w.b());
    if (!t0opt)
        throw std::runtime_error("stationary_phase_eval: no stationary point in support");
    double t0 = *t0opt;
    double A2 = h.d(2, t0);
    if (A2 < 0.0) {
        OscResult r = stationary_phase_eval(w, h.negated(), order);
        r.value = std::conj(r.value);
        return r;
    }
    if (A2 == 0.0)
        throw std::runtime_error("stationary_phase_eval: degenerate h''(t0) = 0");

    // differencing scale: resolve the support, the cubic and the quartic
    // terms of H near t0
    double s = (w.b() - w.a()) / 6.0;
    double c3 = std::abs(h.d(3, t0)), c4 = std::abs(h.d(4, t0));
    if (c3 > 0) s = std::min(s, 0.5 * std::cbrt(6.0 / c3));
    if (c4 > 0) s = std::min(s, 0.5 * std::pow(24.0 / c4, 0.25));
    if (w.scales().U > 0) s = std::min(s, 0.75 * w.scales().U);

    const double h0 = h(t0);
    auto G = [&](double t) -> cdouble {
        double amp = w(t);
        if (amp == 0.0) return {0.0, 0.0};
        double H = h(t) - h0 - 0.5 * A2 * (t - t0) * (t - t0);
        return {amp * std::cos(H), amp * std::sin(H)};
    };

    const cdouble front = std::sqrt(kTwoPi) * std::polar(1.0, kPi / 4.0);
    const cdouble rot = cdouble(0.0, 1.0) / (2.0 * A2);
    double fact = 1.0;
    cdouble series = 0.0;
    cdouble pw = 1.0;
    cdouble last_term = 0.0;
    for (int n = 0; n <= order + 1; ++n) {
        cdouble g2n = central_even_deriv(G, t0, 2 * n, s * (n <= 1 ? 5e-3 : 4e-2));
        cdouble term = front / fact * pw * g2n;
        if (n <= order) series += term;
        last_term = term;
        pw *= rot;
        fact *= (n + 1);
    }
    cdouble value = std::polar(1.0, h0) / std::sqrt(A2) * series;
    double err = std::abs(last_term) / std::sqrt(A2);
    return {value, err, Method::StationaryPhase};
}

Scales calibrate_phase_scales(const PhaseFunction& h, double a, double b,
                              int grid) {
    double rmin = std::numeric_limits<double>::infinity();
    double d2 = 0.0, d3 = 0.0, d4 = 0.0;
    for (int i = 0; i <= grid; ++i) {
        double t = a + (b - a) * i / grid;
        rmin = std::min(rmin, std::abs(h.d(1, t)));
        d2 = std::max(d2, std::abs(h.d(2, t)));
        d3 = std::max(d3, std::abs(h.d(3, t)));
        d4 = std::max(d4, std::abs(h.d(4, t)));
    }
    // Y/Q^j >= Dj for j = 2,3,4 with Y = D2 Q^2 forces Q <= D2/D3 and
    // Q <= sqrt(D2/D4); the certificate only improves as Q grows.
    double Q = b - a;
    if (d3 > 0) Q = std::min(Q, d2 / d3);
    if (d4 > 0) Q = std::min(Q, std::sqrt(d2 / d4));
    if (!(Q > 0) || d2 == 0.0) Q = b - a;
    double Y = std::max(1.0, d2 * Q * Q * 1.0000001);
    return Scales{1.0, Y, 1.0, Q, rmin};
}

OscResult nonstationary_certificate(const AmplitudeFunction& w,
                                    const PhaseFunction& h, int A) {
    if (A < 0) throw std::invalid_argument("nonstationary_certificate: A < 0");
    const Scales& hs = h.scales();
    const Scales& ws = w.scales();
    if (!(hs.R > 0.0) && A > 0)
        throw std::invalid_argument("nonstationary_certificate: declared R must be > 0");

    // sample the declared-scale invariants
    const int grid = 256;
    for (int i = 0; i <= grid; ++i) {
        double t = w.a() + (w.b() - w.a()) * i / grid;
        if (std::abs(h.d(1, t)) < hs.R * (1.0 - 1e-12))
            throw std::runtime_error("nonstationary_certificate: |h'| < declared R");
        for (int j = 2; j <= 4; ++j)
            if (std::abs(h.d(j, t)) > 10.0 * hs.Y / std::pow(hs.Q, j))
                throw std::runtime_error(
                    "nonstationary_certificate: |h^(j)| exceeds 10 Y/Q^j");
        for (int j = 0; j <= 4; ++j)
            if (std::abs(w.d(j, t)) > 10.0 * ws.X / std::pow(ws.U, j))
                throw std::runtime_error(
                    "nonstationary_certificate: |w^(j)| exceeds 10 X/U^j");
    }

    double b1 = std::pow(hs.Q * hs.R / std::sqrt(hs.Y), -A);
    double b2 = std::pow(hs.R * ws.U, -A);
    double bound = (w.b() - w.a()) * ws.X * (b1 + b2);
    return {{0.0, 0.0}, bound, Method::NegligibleCertificate};
}

double bound_2d(double lambda1, double lambda2, double g_var) {
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0))
        throw std::invalid_argument("bound_2d: Lambda factors must be positive");
    return g_var / (lambda1 * lambda2);
}

double total_variation(const std::function<double(double, double)>& g, double ax,
                       double bx, double ay, double by, int n) {
    double ex = (bx - ax) / (8.0 * n), ey = (by - ay) / (8.0 * n);
    auto gxy = [&](double x, double y) {
        return (g(x + ex, y + ey) - g(x + ex, y - ey) - g(x - ex, y + ey) +
                g(x - ex, y - ey)) /
               (4.0 * ex * ey);
    };
    // composite Simpson on |gxy| (n even)
    if (n % 2) ++n;
    double hx = (bx - ax) / n, hy = (by - ay) / n;
    auto wt = [&](int i) { return (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
    double s = 0.0;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            s += wt(i) * wt(j) * std::abs(gxy(ax + i * hx, ay + j * hy));
    return s * hx * hy / 9.0;
}

AmplitudeFunction u_window() {
    PlateauBump u{0.5, 1.0, 2.0, 2.5};
    return make_amplitude([u](double t) { return u(t); }, 0.5, 2.5);
}

PhaseFunction make_I_phase(const IntegralIParams& p) {
    const double a = p.alpha, b = p.beta;
    const double Xb = std::pow(p.X, b);
    const double A = p.X * (double)p.m / (double)p.q;
    const double B = (p.nn > 0 ? std::cbrt(p.X * p.nn) : 0.0) / (double)p.q;
    const double u = p.u;
    const double s = (double)p.sign;
    auto f0 = [=](double y) {
        return kTwoPi * (a * Xb * std::pow(y, b) - A * y + s * 3.0 * B * std::cbrt(y + u));
    };
    auto f1 = [=](double y) {
        return kTwoPi * (a * b * Xb * std::pow(y, b - 1) - A +
                         s * B * std::pow(y + u, -2.0 / 3.0));
    };
    auto f2 = [=](double y) {
        return kTwoPi * (a * b * (b - 1) * Xb * std::pow(y, b - 2) -
                         s * (2.0 / 3.0) * B * std::pow(y + u, -5.0 / 3.0));
    };
    auto f3 = [=](double y) {
        return kTwoPi * (a * b * (b - 1) * (b - 2) * Xb * std::pow(y, b - 3) +
                         s * (10.0 / 9.0) * B * std::pow(y + u, -8.0 / 3.0));
    };
    auto f4 = [=](double y) {
        return kTwoPi * (a * b * (b - 1) * (b - 2) * (b - 3) * Xb * std::pow(y, b - 4) -
                         s * (80.0 / 27.0) * B * std::pow(y + u, -11.0 / 3.0));
    };
    PhaseFunction ph(f0, f1, f2, f3, f4, Scales{});
    // declare scales from a sample of the derivatives on the support
    double Y = 1.0;
    for (int i = 0; i <= 64; ++i) {
        double y = 0.5 + 2.0 * i / 64.0;
        for (int j = 2; j <= 4; ++j) Y = std::max(Y, std::abs(ph.d(j, y)));
    }
    ph.scales() = Scales{1.0, Y, 1.0, 1.0, 0.0};
    return ph;
}

OscResult eval_I(const IntegralIParams& p, double quad_tol) {
    AmplitudeFunction w = u_window();
    PhaseFunction h = make_I_phase(p);
    std::optional<double> t0;
    try {
        t0 = find_stationary_point(h, w.a(), w.b());
    } catch (const std::runtime_error&) {
        t0.reset();  // multiple sign changes: fall back to the oracle
    }
    if (t0) {
        try {
            return stationary_phase_eval(w, h, 2);
        } catch (const std::runtime_error&) {
            // degenerate curvature at t0: quadrature below
        }
    }
    return osc_quadrature(w, h, quad_tol);
}

double l2_average_check(int64_t m, double N0, int64_t q, double alpha, double beta,
                        double X, double u, int sign) {
    Bump W{1.0, 2.0, 1.0};
    auto f = [&](double w) {
        double amp = W(w);
        if (amp == 0.0) return 0.0;
        IntegralIParams p;
        p.m = m;
        p.nn = N0 * w * w * w;
        p.q = q;
        p.u = u;
        p.alpha = alpha;
        p.beta = beta;
        p.X = X;
        p.sign = sign;
        double v = std::abs(eval_I(p).value);
        return amp * v * v;
    };
    // composite Simpson; the integrand is smooth in w
    const int n = 256;
    double h = 1.0 / n, s = 0.0;
    for (int i = 0; i < n; ++i) {
        double a = 1.0 + i * h;
        s += h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
    }
    return s * std::pow(X, beta);
}

}  // namespace gl3::osc
