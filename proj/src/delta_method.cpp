#include "gl3/delta_method.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gl3/expsums.hpp"
#include "gl3/oscillatory.hpp"

namespace gl3::delta {

// The default omega is exp(-3/(1-t^2)) rescaled to [Q/2, Q]: the delta
// identity holds for any admissible bump (the cancellation is structural),
// and this shape also gives the reconstructed g(q,x) its expected decay
// (|g| below 1e-2 by |x| = 10; the wider exp(-1/(1-t^2)) misses that by ~35%).
DeltaExpansion build_delta(int64_t L, double sharp) {
    if (L < 4) throw std::invalid_argument("build_delta: L must be >= 4");
    DeltaExpansion ex;
    ex.L = L;
    ex.Q = 2.0 * std::sqrt((double)L);
    ex.d_max = (int64_t)std::ceil(ex.Q);
    ex.omega_raw = Bump{ex.Q / 2.0, ex.Q, sharp};
    ex.norm = 0.0;
    for (int64_t d = 1; d <= ex.d_max; ++d) ex.norm += ex.omega_raw((double)d);
    if (!(ex.norm > 0.0)) throw std::logic_error("build_delta: empty omega support");
    return ex;
}

double delta_eval(const DeltaExpansion& ex, int64_t n) {
    if (std::llabs(n) > ex.L) throw std::out_of_range("delta_eval: |n| > L");
    int64_t an = std::llabs(n);
    Kahan<double> acc;
    for (int64_t d = 1; d <= ex.d_max; ++d) {
        double coef = (ex.omega((double)d) - ex.omega((double)an / (double)d)) / (double)d;
        if (coef == 0.0) continue;
        // complete additive character sum; imaginary part cancels in pairs
        Kahan<double> s;
        for (int64_t c = 0; c < d; ++c)
            s.add(std::cos(kTwoPi * (double)(c * (an % d) % d) / (double)d));
        acc.add(coef * s.sum());
    }
    return acc.sum();
}

// Delta_q(u) matters for the delta identity only at |u| <= L, so any smooth
// compactly supported extension gives a valid weight g; the taper is flat
// out to max(2L, 2qQ) and the x-integral of the reconstruction can then be
// taken in closed form per grid node.
GWeight::GWeight(const DeltaExpansion& ex, int64_t q, double taper_mult, int n_u) {
    if (q < 1 || (double)q > ex.Q) throw std::out_of_range("GWeight: q outside [1, Q]");
    qq_ = (double)q * ex.Q;
    double flat = std::max(taper_mult * qq_, 2.0 * (double)ex.L);
    const double u_max = 2.0 * flat;
    if (n_u <= 0) {
        // resolve oscillations up to |x| ~ 120 and the omega transitions
        double du = qq_ / 1600.0;
        n_u = (int)std::ceil(u_max / du);
    }
    if (n_u % 2) ++n_u;
    du_ = u_max / n_u;

    // constant first part sum_r omega(qr)/r (support qr <= Q)
    double c1 = 0.0;
    for (int64_t r = 1; q * r <= (int64_t)std::ceil(ex.Q); ++r)
        c1 += ex.omega((double)(q * r)) / (double)r;

    PlateauBump taper{-u_max, -flat, flat, u_max};
    tab_.resize(n_u + 1);
    for (int i = 0; i <= n_u; ++i) {
        double u = i * du_;
        double second = 0.0;
        if (u > 0.0) {
            int64_t r_lo = (int64_t)std::floor(u / qq_);
            int64_t r_hi = (int64_t)std::ceil(2.0 * u / qq_) + 1;
            for (int64_t r = std::max<int64_t>(1, r_lo); r <= r_hi; ++r)
                second += ex.omega(u / (double)(q * r)) / (double)r;
        }
        double dq = (c1 - second) / (double)q;
        double w = (i == 0 || i == n_u) ? 1.0 : (i % 2 ? 4.0 : 2.0);  // Simpson
        tab_[i] = dq * taper(u) * w * du_ / 3.0;
    }
}

double GWeight::operator()(double x) const {
    // g(q,x) = 2 int_0^inf Delta_q(u) taper(u) cos(2 pi x u / (qQ)) du
    double freq = kTwoPi * x / qq_;
    Kahan<double> acc;
    for (size_t i = 0; i < tab_.size(); ++i) {
        if (tab_[i] == 0.0) continue;
        acc.add(tab_[i] * std::cos(freq * (double)i * du_));
    }
    return 2.0 * acc.sum();
}

double GWeight::integral_dx(double x_max) const {
    // int_{-X}^{X} g(q,x) dx with the cosine integrated in closed form
    Kahan<double> acc;
    for (size_t i = 0; i < tab_.size(); ++i) {
        if (tab_[i] == 0.0) continue;
        double u = (double)i * du_;
        double k = kTwoPi * u / qq_;
        double factor = (i == 0) ? 2.0 * x_max : 2.0 * std::sin(k * x_max) / k;
        acc.add(tab_[i] * factor);
    }
    return 2.0 * acc.sum();
}

double g_weight(const DeltaExpansion& ex, int64_t q, double x) {
    GWeight g1(ex, q);
    double v1 = g1(x);
    // resolution check doubles the grid; disagreement is a failure
    GWeight g2(ex, q, 2.0, (int)(2 * g1.size()));
    double v2 = g2(x);
    if (std::abs(v1 - v2) > 1e-6 * std::max(1.0, std::abs(v2)))
        throw std::runtime_error("g_weight: u-grid not converged");
    return v2;
}

double resynthesize_delta0(const DeltaExpansion& ex, double x_max, int) {
    Kahan<double> total;
    for (int64_t q = 1; (double)q <= ex.Q; ++q) {
        GWeight g(ex, q);
        total.add((double)expsums::euler_phi(q) / ((double)q * ex.Q) *
                  g.integral_dx(x_max));
    }
    return total.sum();
}

PoissonDualReport verify_poisson_dual_sum(double alpha, double beta, double X,
                                          int64_t q, int64_t a, double v, double x,
                                          double trunc_eps, int max_members) {
    if (q < 1 || std::gcd(((a % q) + q) % q, q) != 1)
        throw std::invalid_argument("verify_poisson_dual_sum: need gcd(a,q)=1");
    if (!(X >= 10.0)) throw std::invalid_argument("verify_poisson_dual_sum: X < 10");
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("verify_poisson_dual_sum: beta outside (0,1)");

    const double Q = std::sqrt(X);
    const int64_t a_red = ((a % q) + q) % q;
    PlateauBump U{0.5, 1.0, 2.0, 2.5};

    // direct side
    Kahan<std::complex<double>> lhs;
    int64_t m_hi = (int64_t)std::ceil(2.5 * X);
    for (int64_t m = (int64_t)std::floor(0.5 * X); m <= m_hi; ++m) {
        if (m < 1) continue;
        double amp = U((double)m / X);
        if (amp == 0.0) continue;
        double phase = kTwoPi * (alpha * std::pow((double)m, beta) -
                                 (double)(a_red * m % q) / (double)q -
                                 (double)m * x / ((double)q * Q)) -
                       v * std::log((double)m);
        lhs.add(amp * std::complex<double>(std::cos(phase), std::sin(phase)));
    }

    // dual side: m == a (mod q); the y-integral for one frequency m
    osc::AmplitudeFunction w = osc::u_window();
    auto dual_phase = [&](int64_t m) {
        const double Xb = std::pow(X, beta);
        const double c = X * x / ((double)q * Q) + X * (double)m / (double)q;
        auto f0 = [=](double y) {
            return kTwoPi * (alpha * Xb * std::pow(y, beta) - c * y) -
                   v * std::log(y);
        };
        auto f1 = [=](double y) {
            return kTwoPi * (alpha * beta * Xb * std::pow(y, beta - 1) - c) - v / y;
        };
        auto f2 = [=](double y) {
            return kTwoPi * (alpha * beta * (beta - 1) * Xb * std::pow(y, beta - 2)) +
                   v / (y * y);
        };
        auto f3 = [=](double y) {
            return kTwoPi * (alpha * beta * (beta - 1) * (beta - 2) * Xb *
                             std::pow(y, beta - 3)) -
                   2.0 * v / (y * y * y);
        };
        auto f4 = [=](double y) {
            return kTwoPi * (alpha * beta * (beta - 1) * (beta - 2) * (beta - 3) * Xb *
                             std::pow(y, beta - 4)) +
                   6.0 * v / (y * y * y * y);
        };
        return osc::PhaseFunction(f0, f1, f2, f3, f4, osc::Scales{});
    };

    // effective range per the Poisson analysis; everything beyond is
    // accounted for by non-stationarity certificates, not quadrature
    const double m_cut =
        4.0 * std::max((double)q * std::pow(X, beta - 1.0), 1.0 / Q) *
        std::pow(X, trunc_eps);

    // collect class members by |m|: a_red, a_red - q, a_red + q, ...
    std::vector<int64_t> members;
    for (int64_t k = 0; (int)members.size() < 4096; ++k) {
        int64_t up = a_red + k * q;
        int64_t dn = a_red - (k + 1) * q;
        members.push_back(up);
        members.push_back(dn);
        if ((double)std::min(std::llabs(up), std::llabs(dn)) > 40.0 * std::max(1.0, m_cut) &&
            (int)members.size() >= 64)
            break;
    }
    std::sort(members.begin(), members.end(),
              [](int64_t p, int64_t r) { return std::llabs(p) < std::llabs(r); });

    Kahan<std::complex<double>> rhs;
    double mass_kept = 0.0, tail_bound = 0.0;
    int terms = 0;
    for (int64_t m : members) {
        bool keep = (double)std::llabs(m) <= m_cut || (terms == 0 && m == members[0]);
        if (max_members > 0) keep = terms < max_members;
        osc::PhaseFunction ph = dual_phase(m);
        if (keep) {
            auto r = osc::osc_quadrature(w, ph, 1e-13);
            rhs.add(r.value);
            mass_kept += std::abs(r.value);
            ++terms;
        } else {
            // non-stationarity certificate at A = 10 with measured scales
            ph.scales() = osc::calibrate_phase_scales(ph, 0.5, 2.5);
            if (ph.scales().R > 0.0)
                tail_bound += osc::nonstationary_certificate(w, ph, 10).err_estimate;
            else
                tail_bound += 2.0;  // no certificate possible; count full mass
        }
    }

    std::complex<double> rhs_val =
        X * std::polar(1.0, -v * std::log(X)) * rhs.sum();

    PoissonDualReport rep;
    rep.lhs = lhs.sum();
    rep.rhs = rhs_val;
    rep.rel_err = std::abs(rep.lhs - rep.rhs) / std::abs(rep.lhs);
    rep.tail_fraction = X * tail_bound / std::abs(rep.rhs);
    rep.dual_terms = terms;
    return rep;
}

}  // namespace gl3::delta
