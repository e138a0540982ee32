#include "gl3/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gl3/expsums.hpp"
#include "gl3/oscillatory.hpp"
#include "gl3/util.hpp"

namespace gl3::voronoi {

SpectralParams SpectralParams::eisenstein_tau3() {
    SpectralParams p;
    p.alpha = {cdouble(0), cdouble(0), cdouble(0)};
    p.even_shifts = {0.0, 0.0, 0.0};
    p.odd_shifts = {1.0, 1.0, 1.0};
    return p;
}

// sym^2 of the weight-12 form: L_inf(s) = Gamma_R(s+1) Gamma_C(s+11)
//                                       = Gamma_R(s+1) Gamma_R(s+11) Gamma_R(s+12);
// twisting by sgn flips only the Gamma_R(s+1) factor to Gamma_R(s).
SpectralParams SpectralParams::sym2_weight12() {
    SpectralParams p;
    p.alpha = {cdouble(11), cdouble(0), cdouble(-11)};
    p.even_shifts = {1.0, 11.0, 12.0};
    p.odd_shifts = {0.0, 11.0, 12.0};
    return p;
}

TestFunction::TestFunction(double y_lo, double y_hi) : lo_(y_lo), hi_(y_hi) {
    if (!(0.0 < y_lo && y_lo < y_hi))
        throw std::invalid_argument("TestFunction: need 0 < lo < hi");
}

double TestFunction::operator()(double x) const {
    return Bump{lo_, hi_, 1.0}(x);
}
double TestFunction::deriv(double x) const { return Bump{lo_, hi_, 1.0}.deriv(x); }
double TestFunction::mass() const { return Bump{lo_, hi_, 1.0}.mass(); }
double TestFunction::abs_deriv_mass() const {
    Bump b{lo_, hi_, 1.0};
    const int n = 4096;
    double h = (hi_ - lo_) / n, s = 0.0;
    for (int i = 0; i < n; ++i) {
        double a = lo_ + i * h;
        s += h / 6.0 *
             (std::abs(b.deriv(a)) + 4.0 * std::abs(b.deriv(a + 0.5 * h)) +
              std::abs(b.deriv(a + h)));
    }
    return s;
}

namespace {

// Gauss-Kronrod 15 abscissae/weights on [-1,1] (K15 only)
constexpr double kNodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,                0.207784955007898,
    0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
constexpr double kWts[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};

cdouble log_sin_pi(cdouble z) {
    cdouble w = kPi * z;
    double im = w.imag();
    if (im > 18.0)
        return cdouble(0, -1) * w + std::log(cdouble(0, 0.5)) +
               std::log(1.0 - std::exp(cdouble(0, 2) * w));
    if (im < -18.0)
        return cdouble(0, 1) * w + std::log(cdouble(0, -0.5)) +
               std::log(1.0 - std::exp(cdouble(0, -2) * w));
    return std::log(std::sin(w));
}

// Lanczos log-Gamma; any branch is fine since results are only exponentiated
// after summation.
cdouble log_gamma(cdouble z) {
    static const double c[9] = {0.99999999999980993,    676.5203681218851,
                                -1259.1392167224028,    771.32342877765313,
                                -176.61502916214059,    12.507343278686905,
                                -0.13857109526572012,   9.9843695780195716e-6,
                                1.5056327351493116e-7};
    if (z.real() < 0.5)
        return std::log(cdouble(kPi)) - log_sin_pi(z) - log_gamma(1.0 - z);
    z -= 1.0;
    cdouble x = c[0];
    for (int i = 1; i < 9; ++i) x += c[i] / (z + (double)i);
    cdouble t = z + 7.5;
    return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

// fixed complex Gauss-Kronrod quadrature of psi(e^v) e^{s v} over the
// support in v, with panels sized for |Im s|
cdouble mellin_line(const TestFunction& psi, cdouble s) {
    double v0 = std::log(psi.lo()), v1 = std::log(psi.hi());
    int panels = std::max(6, (int)std::ceil((v1 - v0) * std::abs(s.imag()) /
                                            (2.0 * kPi) * 5.0));
    cdouble acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        double a = v0 + (v1 - v0) * p / panels;
        double b = v0 + (v1 - v0) * (p + 1) / panels;
        double c = 0.5 * (a + b), m = 0.5 * (b - a);
        cdouble sum = 0.0;
        for (int i = 0; i < 15; ++i) {
            double v = c + m * kNodes[i];
            sum += kWts[i] * psi(std::exp(v)) * std::exp(s * v);
        }
        acc += sum * m;
    }
    return acc;
}

struct KernelShifts {
    std::array<double, 3> num, den;
};

KernelShifts kernel_shifts(const SpectralParams& sp, int k) {
    KernelShifts ks;
    if (k == 0)
        for (int j = 0; j < 3; ++j) {
            ks.num[j] = 1.0 + sp.even_shifts[j];   // Gamma((1+s+be)/2)
            ks.den[j] = sp.even_shifts[j];         // Gamma((-s+be)/2)
        }
    else
        for (int j = 0; j < 3; ++j) {
            ks.num[j] = 2.0 + sp.odd_shifts[j];    // Gamma((2+s+bo)/2)
            ks.den[j] = -1.0 + sp.odd_shifts[j];   // Gamma((-1-s+bo)/2)
        }
    return ks;
}

cdouble kernel_value(const KernelShifts& ks, cdouble s) {
    cdouble lg = 0.0;
    for (int j = 0; j < 3; ++j)
        lg += log_gamma(0.5 * (ks.num[j] + s)) - log_gamma(0.5 * (ks.den[j] - s));
    return std::exp(lg);
}

// Cached vertical-line grid for Psi_k over a range of x values. Nodes t >= 0
// (the t < 0 half is the conjugate); the grid extends until the integrand
// envelope has decayed to ~1e-10 of its running total or hits the double-
// precision noise floor of the Mellin factor.
class PsiEngine {
public:
    PsiEngine(const TestFunction& psi, const SpectralParams& sp, int k,
              double sigma, double x_min, double x_max)
        : sigma_(sigma), k_(k) {
        KernelShifts ks = kernel_shifts(sp, k);
        for (int j = 0; j < 3; ++j) {
            // contour must stay right of the rightmost numerator pole
            double pole = -ks.num[j];
            if (sigma <= pole + 1e-3)
                throw std::invalid_argument(
                    "psi engine: contour within 1e-3 of a Gamma pole");
        }
        const double Lx =
            std::max(std::abs(std::log(kPi * kPi * kPi * x_min)),
                     std::abs(std::log(kPi * kPi * kPi * x_max)));
        const double Ly = std::abs(std::log(psi.hi())) + 1.0;
        const cdouble ms_base(-sigma - k, 0.0);

        double env_total = 0.0, env_prev_chunk = 1e300;
        const double chunk_len = 32.0;
        double t0 = 0.0;
        int rising = 0;
        while (true) {
            double t1 = t0 + chunk_len;
            double env_chunk = 0.0;
            double t = t0;
            while (t < t1) {
                double freq = Lx + Ly + 3.0 * std::log(2.0 + (t + 16.0) / 2.0) + 2.0;
                double dt = std::min(t1 - t, 2.0 * kPi / (1.25 * freq));
                double c = t + 0.5 * dt, m = 0.5 * dt;
                for (int i = 0; i < 15; ++i) {
                    double ti = c + m * kNodes[i];
                    cdouble s(sigma, ti);
                    cdouble w = kernel_value(ks, s) *
                                mellin_line(psiref(psi), ms_base - cdouble(0, ti));
                    t_.push_back(ti);
                    wt_.push_back(kWts[i] * m);
                    W_.push_back(w);
                    env_chunk += std::abs(w) * kWts[i] * m;
                }
                t += dt;
            }
            env_total += env_chunk;
            t0 = t1;
            if (env_chunk < 1e-10 * env_total && t0 >= 64.0) {
                tail_env_ = env_chunk;
                break;
            }
            if (env_chunk > env_prev_chunk) {
                // envelope rising again: Mellin noise floor reached
                if (env_chunk < 1e-7 * env_total) {
                    tail_env_ = env_chunk;
                    break;
                }
                if (++rising > 4 && t0 > 512.0)
                    throw std::runtime_error(
                        "psi engine: integrand tail does not decay (noise floor "
                        "dominates before the tail criterion is met)");
            } else {
                rising = 0;
            }
            env_prev_chunk = env_chunk;
            if (t0 > 6000.0)
                throw std::runtime_error("psi engine: tail estimate not met by t = 6000");
        }
    }

    cdouble eval(double x) const {
        double L = std::log(kPi * kPi * kPi * x);
        Kahan<double> re;
        for (size_t i = 0; i < t_.size(); ++i) {
            double ang = -t_[i] * L;
            re.add(wt_[i] * (W_[i].real() * std::cos(ang) - W_[i].imag() * std::sin(ang)));
        }
        return cdouble(0.0, 2.0 * std::pow(kPi * kPi * kPi * x, -sigma_) * re.sum());
    }

private:
    static const TestFunction& psiref(const TestFunction& p) { return p; }

    double sigma_, k_;
    double tail_env_ = 0.0;
    std::vector<double> t_, wt_;
    std::vector<cdouble> W_;
};

int64_t reduce_mod(int64_t a, int64_t q) { return ((a % q) + q) % q; }

}  // namespace

cdouble mellin(const TestFunction& psi, cdouble s) { return mellin_line(psi, s); }

cdouble psi_k(double x, int k, const VoronoiContext& ctx, double sigma) {
    if (!(x > 0.0)) throw std::invalid_argument("psi_k: x must be positive");
    if (k != 0 && k != 1) throw std::invalid_argument("psi_k: k must be 0 or 1");
    PsiEngine eng(ctx.psi, ctx.params, k, sigma, x, x);
    return eng.eval(x);
}

cdouble voronoi_lhs(const VoronoiContext& ctx) {
    const auto& tab = *ctx.table;
    if ((int64_t)std::ceil(ctx.psi.hi()) > tab.max_n())
        throw std::out_of_range("voronoi_lhs: table does not cover psi support");
    int64_t q = ctx.q;
    Kahan<cdouble> acc;
    for (int64_t n = (int64_t)ctx.psi.lo(); n <= (int64_t)std::ceil(ctx.psi.hi()); ++n) {
        if (n < 1) continue;
        double w = ctx.psi((double)n);
        if (w == 0.0) continue;
        acc.add(tab.lambda(ctx.m, n) * w * e_of((double)(reduce_mod(ctx.a * n, q)) / (double)q));
    }
    return acc.sum();
}

cdouble hurwitz_zeta(cdouble s, double a) {
    if (!(a > 0.0 && a <= 1.0))
        throw std::invalid_argument("hurwitz_zeta: need 0 < a <= 1");
    // Euler-Maclaurin with N terms and Bernoulli corrections
    const int N = 24;
    static const double B[10] = {1.0 / 6,      -1.0 / 30,    1.0 / 42,
                                 -1.0 / 30,    5.0 / 66,     -691.0 / 2730,
                                 7.0 / 6,      -3617.0 / 510, 43867.0 / 798,
                                 -174611.0 / 330};
    Kahan<cdouble> sum;
    for (int n = 0; n < N; ++n) sum.add(std::pow(cdouble(n + a), -s));
    cdouble Na(N + a);
    cdouble acc = sum.sum();
    acc += std::pow(Na, 1.0 - s) / (s - 1.0);
    acc += 0.5 * std::pow(Na, -s);
    cdouble poch = s;          // (s)_1
    cdouble Npow = std::pow(Na, -s - 1.0);
    double fact = 2.0;         // (2j)! running
    for (int j = 1; j <= 10; ++j) {
        acc += B[j - 1] / fact * poch * Npow;
        // advance (s)_{2j-1} -> (s)_{2j+1}, (2j)! -> (2j+2)!, Na^{-s-2j+1} -> ...
        poch *= (s + (double)(2 * j - 1)) * (s + (double)(2 * j));
        Npow /= (Na * Na);
        fact *= (double)(2 * j + 1) * (double)(2 * j + 2);
    }
    return acc;
}

cdouble eisenstein_main_term(int64_t q, int64_t a, const TestFunction& psi) {
    // residue at s = 1 via a circle contour |s-1| = r
    const double r = 0.4;
    const int M = 48;
    Kahan<cdouble> acc;
    for (int j = 0; j < M; ++j) {
        double th = kTwoPi * j / M;
        cdouble s = 1.0 + r * std::polar(1.0, th);
        // E_3(s, a/q) = q^{-3s} sum_{u,v,w mod q} e(a uvw / q) prod zeta(s, ./q)
        std::vector<cdouble> zh(q + 1);
        for (int64_t u = 1; u <= q; ++u) zh[u] = hurwitz_zeta(s, (double)u / (double)q);
        Kahan<cdouble> trip;
        for (int64_t u = 1; u <= q; ++u)
            for (int64_t v = 1; v <= q; ++v) {
                int64_t uv = reduce_mod(u * v, q);
                for (int64_t w = 1; w <= q; ++w)
                    trip.add(e_of((double)reduce_mod(a * uv * w, q) / (double)q) *
                             zh[u] * zh[v] * zh[w]);
            }
        cdouble F = std::pow(cdouble(q), -3.0 * s) * trip.sum() * mellin(psi, s);
        // (1/2pi i) . F . ds with ds = i r e^{i th} dth
        acc.add(F * r * std::polar(1.0, th));
    }
    return acc.sum() / (double)M;
}

RhsResult voronoi_rhs(const VoronoiContext& ctx) {
    const auto& tab = *ctx.table;
    const int64_t q = ctx.q, m = ctx.m;
    if (std::gcd(reduce_mod(ctx.a, q), q) != 1 && q > 1)
        throw std::invalid_argument("voronoi_rhs: gcd(a,q) != 1");
    const int64_t abar = q == 1 ? 0 : expsums::mod_inverse(ctx.a, q);

    const int64_t qm = q * m;
    std::vector<int64_t> divisors;
    for (int64_t d = 1; d <= qm; ++d)
        if (qm % d == 0) divisors.push_back(d);

    const double x_lo = 1.0 / ((double)q * q * q * (double)m);
    const double x_hi = x_lo * 1e6;  // generous frequency headroom in the grid
    PsiEngine eng0(ctx.psi, ctx.params, 0, ctx.sigma, x_lo, x_hi);
    PsiEngine eng1(ctx.psi, ctx.params, 1, ctx.sigma, x_lo, x_hi);

    const int64_t n2_max_cap = ctx.n2_cut > 0 ? ctx.n2_cut : 200000;
    Kahan<cdouble> total;
    double mass = 0.0;
    double tail_estimate = 0.0;
    int64_t n2_used = 0;

    for (int64_t n1 : divisors) {
        const int64_t mod = qm / n1;
        // Kloosterman values depend on +-n2 mod the modulus only
        std::vector<cdouble> kl_plus(mod), kl_minus(mod);
        for (int64_t r = 0; r < mod; ++r) {
            kl_plus[r] = expsums::kloosterman(m * abar, r, mod);
            kl_minus[r] = expsums::kloosterman(m * abar, -r, mod);
        }
        const double x_base = (double)n1 * (double)n1 / ((double)q * q * q * (double)m);

        Kahan<cdouble> branch;
        double branch_mass = 0.0;
        int64_t n2 = 1;
        int64_t block_end = 16;
        bool done = false;
        while (!done) {
            double block_mass = 0.0;
            for (; n2 <= block_end; ++n2) {
                if (n2 > tab.max_m())
                    throw std::out_of_range(
                        "voronoi_rhs: coefficient table max_m too small for the "
                        "dual sum");
                double lam = tab.lambda(n2, n1);
                if (lam != 0.0) {
                    double x = x_base * (double)n2;
                    cdouble p0 = eng0.eval(x);
                    cdouble p1 = eng1.eval(x);
                    cdouble corr = p1 / (cdouble(0, 1) * kPi * kPi * kPi * x);
                    cdouble psi_plus = p0 + corr;
                    cdouble psi_minus = p0 - corr;
                    cdouble term =
                        lam / ((double)n1 * (double)n2) *
                        (kl_plus[n2 % mod] * psi_plus + kl_minus[n2 % mod] * psi_minus);
                    branch.add(term);
                    block_mass += std::abs(term);
                }
            }
            branch_mass += block_mass;
            n2_used = std::max(n2_used, n2 - 1);
            if (ctx.n2_cut > 0 && n2 > ctx.n2_cut) {
                tail_estimate += block_mass;
                break;
            }
            double scale = std::max(std::abs(total.sum() + branch.sum()),
                                    1e-3 * (mass + branch_mass));
            if (block_end >= 64 && block_mass < 2.5e-5 * scale) {
                tail_estimate += block_mass;
                done = true;
            } else if (n2 > n2_max_cap) {
                throw std::runtime_error(
                    "voronoi_rhs: dual-sum tail estimate not met before the n2 cap");
            }
            block_end *= 2;
        }
        total.add(branch.sum());
        mass += branch_mass;
    }

    RhsResult out;
    cdouble pref = (double)q * std::pow(kPi, -2.5) / (4.0 * cdouble(0, 1));
    out.dual_sum = pref * total.sum();
    if (tab.kind() == coeffs::Kind::EisensteinTau3)
        out.main_term = eisenstein_main_term(q, ctx.a, ctx.psi);
    out.value = out.dual_sum + out.main_term;
    out.n2_used = n2_used;
    double denom = std::max(std::abs(out.value), 1e-300);
    out.tail_estimate = std::abs(pref) * tail_estimate / denom;
    return out;
}

double voronoi_residual(const VoronoiContext& ctx) {
    cdouble lhs = voronoi_lhs(ctx);
    RhsResult rhs = voronoi_rhs(ctx);
    // scale floor: 1e-3 of the absolute-value mass of the direct side
    const auto& tab = *ctx.table;
    double mass = 0.0;
    for (int64_t n = (int64_t)ctx.psi.lo(); n <= (int64_t)std::ceil(ctx.psi.hi()); ++n) {
        if (n < 1) continue;
        mass += std::abs(tab.lambda(ctx.m, n) * ctx.psi((double)n));
    }
    return std::abs(lhs - rhs.value) / std::max(std::abs(lhs), 1e-3 * mass);
}

cdouble psi0_asymptotic(double x, int J, const VoronoiContext& ctx,
                        const std::vector<std::pair<double, double>>& coeffs) {
    if ((int)coeffs.size() < J)
        throw std::invalid_argument("psi0_asymptotic: not enough coefficients");
    double Y = ctx.psi.lo();
    if (!(x * Y >= 10.0))
        throw std::invalid_argument("psi0_asymptotic: xY too small for the expansion");
    const double c = 6.0 * kPi * std::cbrt(x);
    osc::PhaseFunction ph(
        [c](double y) { return c * std::cbrt(y); },
        [c](double y) { return c / 3.0 * std::pow(y, -2.0 / 3.0); },
        [c](double y) { return -2.0 * c / 9.0 * std::pow(y, -5.0 / 3.0); },
        [c](double y) { return 10.0 * c / 27.0 * std::pow(y, -8.0 / 3.0); },
        [c](double y) { return -80.0 * c / 81.0 * std::pow(y, -11.0 / 3.0); },
        osc::Scales{});
    const TestFunction psi = ctx.psi;
    // for each j: C_j = Re int psi (pi^3 xy)^{-j/3} e^{i 6 pi (xy)^{1/3}},
    //             S_j = Im of the same integral
    double series = 0.0;
    for (int j = 1; j <= J; ++j) {
        double p = (double)j / 3.0;
        auto amp = osc::make_amplitude(
            [psi, p, x](double y) {
                double v = psi(y);
                return v == 0.0 ? 0.0 : v * std::pow(kPi * kPi * kPi * x * y, -p);
            },
            psi.lo(), psi.hi());
        auto r = osc::osc_quadrature(amp, ph, 1e-12);
        series += coeffs[j - 1].first * r.value.real() +
                  coeffs[j - 1].second * r.value.imag();
    }
    return cdouble(0, 1) * 2.0 * std::pow(kPi, 4) * x * series;
}

Psi0Fit fit_psi0_leading(const VoronoiContext& ctx, double xy_lo, double xy_hi,
                         int samples) {
    const double Y = ctx.psi.lo();
    std::vector<double> xs(samples);
    for (int i = 0; i < samples; ++i)
        xs[i] = xy_lo * std::pow(xy_hi / xy_lo, (double)i / (samples - 1)) / Y;

    PsiEngine eng0(ctx.psi, ctx.params, 0, ctx.sigma, xs.front(), xs.back());
    const TestFunction psi = ctx.psi;

    std::vector<cdouble> z(samples), A(samples), B(samples);
    for (int i = 0; i < samples; ++i) {
        double x = xs[i];
        z[i] = eng0.eval(x);
        const double c = 6.0 * kPi * std::cbrt(x);
        osc::PhaseFunction ph(
            [c](double y) { return c * std::cbrt(y); },
            [c](double y) { return c / 3.0 * std::pow(y, -2.0 / 3.0); },
            [c](double y) { return -2.0 * c / 9.0 * std::pow(y, -5.0 / 3.0); },
            [c](double y) { return 10.0 * c / 27.0 * std::pow(y, -8.0 / 3.0); },
            [c](double y) { return -80.0 * c / 81.0 * std::pow(y, -11.0 / 3.0); },
            osc::Scales{});
        auto amp = osc::make_amplitude(
            [psi, x](double y) {
                double v = psi(y);
                return v == 0.0 ? 0.0 : v * std::pow(kPi * kPi * kPi * x * y, -1.0 / 3.0);
            },
            psi.lo(), psi.hi());
        auto r = osc::osc_quadrature(amp, ph, 1e-12);
        cdouble pref = cdouble(0, 1) * 2.0 * std::pow(kPi, 4) * x;
        A[i] = pref * r.value.real();  // cos part
        B[i] = pref * r.value.imag();  // sin part
    }

    // real 2x2 least squares for z ~ c1 A + d1 B
    double aa = 0, ab = 0, bb = 0, az = 0, bz = 0;
    for (int i = 0; i < samples; ++i) {
        aa += std::norm(A[i]);
        bb += std::norm(B[i]);
        ab += (std::conj(A[i]) * B[i]).real();
        az += (std::conj(A[i]) * z[i]).real();
        bz += (std::conj(B[i]) * z[i]).real();
    }
    double det = aa * bb - ab * ab;
    if (std::abs(det) < 1e-30) throw std::runtime_error("fit_psi0_leading: singular fit");
    Psi0Fit fit;
    fit.c1 = (az * bb - bz * ab) / det;
    fit.d1 = (bz * aa - az * ab) / det;

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int i = 0; i < samples; ++i) {
        cdouble res = z[i] - fit.c1 * A[i] - fit.d1 * B[i];
        fit.max_rel_residual =
            std::max(fit.max_rel_residual, std::abs(res) / std::abs(z[i]));
        if (std::abs(res) > 0) {
            double lx = std::log(xs[i] * Y), ly = std::log(std::abs(res));
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
            ++n;
        }
    }
    if (n >= 2) fit.residual_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return fit;
}

}  // namespace gl3::voronoi
