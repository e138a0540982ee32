#pragma once
// Oscillatory-integral engine for integrals  I = int w(t) e^{i h(t)} dt :
//   - adaptive Gauss-Kronrod quadrature with oscillation-length panelling
//     (the independent oracle for everything else),
//   - stationary-phase expansion  I = e^{ih(t0)}/sqrt(h''(t0)) sum_n p_n(t0),
//     p_n = (sqrt(2pi) e^{i pi/4}/n!) (i/(2h''(t0)))^n G^{(2n)}(t0),
//     G = w e^{iH}, H = h - h(t0) - h''(t0)(t-t0)^2/2,
//   - non-stationarity certificates  (b-a) X ((QR/sqrt(Y))^-A + (RU)^-A),
//   - the second-derivative bound var(g)/(Lambda1 Lambda2) in two variables,
// plus the two concrete integrals used by the twist pipeline: the y-integral
// I(m, n1^2 n2, q) after Voronoi and its L^2 average over the dual variable.

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>

namespace gl3::osc {

using cdouble = std::complex<double>;

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// scale parameters in the usual exponential-integral normalization:
// |w^(j)| <= X/U^j, |h^(j)| <= Y/Q^j (j >= 2), |h'| >= R
struct Scales {
    double X = 1.0, Y = 1.0, U = 1.0, Q = 1.0, R = 0.0;
};

// smooth real phase with derivative access up to order 4
class PhaseFunction {
public:
    using Fn = std::function<double(double)>;
    PhaseFunction() = default;
    PhaseFunction(Fn h, Fn h1, Fn h2, Fn h3, Fn h4, Scales sc)
        : f_{std::move(h), std::move(h1), std::move(h2), std::move(h3), std::move(h4)},
          scales_(sc) {}

    double operator()(double t) const { return f_[0](t); }
    double d(int k, double t) const { return f_[k](t); }
    const Scales& scales() const { return scales_; }
    Scales& scales() { return scales_; }
    PhaseFunction negated() const;

private:
    Fn f_[5];
    Scales scales_;
};

// smooth amplitude supported in [a,b]; derivatives fall back to central
// finite differences when not supplied
class AmplitudeFunction {
public:
    using Fn = std::function<double(double)>;
    AmplitudeFunction() = default;
    AmplitudeFunction(Fn w, double a, double b, Scales sc, Fn d1 = {}, Fn d2 = {});

    double operator()(double t) const { return (t <= a_ || t >= b_) ? 0.0 : w_(t); }
    double d(int k, double t) const;  // k <= 4
    double a() const { return a_; }
    double b() const { return b_; }
    const Scales& scales() const { return scales_; }

private:
    Fn w_, d1_, d2_;
    double a_ = 0.0, b_ = 1.0;
    Scales scales_;
};

// builds an amplitude whose declared scales (X, U) are calibrated from
// sampled derivative sups, so that |w^(j)| <= 10 X / U^j holds for j <= 4
AmplitudeFunction make_amplitude(AmplitudeFunction::Fn w, double a, double b,
                                 AmplitudeFunction::Fn d1 = {},
                                 AmplitudeFunction::Fn d2 = {});

enum class Method { Quadrature, StationaryPhase, NegligibleCertificate };

struct OscResult {
    cdouble value{0.0, 0.0};
    double err_estimate = 0.0;
    Method method = Method::Quadrature;
};

// adaptive quadrature of int w e^{ih}; tol in (1e-14, 1e-2) is an absolute
// target relative to max(1, int |w|). Throws QuadratureError instead of
// returning a silent wrong value.
OscResult osc_quadrature(const AmplitudeFunction& w, const PhaseFunction& h,
                         double tol);

// unique root of h' in [a,b] (bisection + Newton, to ~1e-12 of the width);
// nullopt when h' has no sign change, with *min_abs_deriv set to the grid
// minimum of |h'|. Multiple sign changes throw.
std::optional<double> find_stationary_point(const PhaseFunction& h, double a,
                                            double b, int grid = 257,
                                            double* min_abs_deriv = nullptr);

// expansion around the unique stationary point; order <= 2. h''(t0) < 0 is
// handled by conjugate reflection, h''(t0) = 0 is an error.
OscResult stationary_phase_eval(const AmplitudeFunction& w, const PhaseFunction& h,
                                int order);

// Richardson diagnostic for the central difference schemes used inside the
// expansion: returns (D(eps) - D(eps/2)) / (D(eps/2) - D(eps/4)), which
// should be ~4 for a second-order scheme applied to smooth data.
double fd_richardson_ratio(const std::function<cdouble(double)>& g, double t0,
                           int deriv_order, double eps);

// Measures |h'| (floor) and |h''|..|h''''| (sups) on a grid over [a,b] and
// returns declarations with R = min |h'| and (Y, Q) chosen so the j = 2..4
// bounds hold with Q as large as the measured derivative ladder permits
// (which makes the certificate below as strong as the data allows).
Scales calibrate_phase_scales(const PhaseFunction& h, double a, double b,
                              int grid = 512);

// certificate that the integral is negligible when |h'| >= R throughout:
// value 0, err = (b-a) X ((QR/sqrt(Y))^-A + (RU)^-A) from the declared scales.
// Scale declarations are sampled; inconsistency is an error.
OscResult nonstationary_certificate(const AmplitudeFunction& w,
                                    const PhaseFunction& h, int A);

// two-dimensional second-derivative bound: var(g) / (Lambda1 Lambda2)
double bound_2d(double lambda1, double lambda2, double g_var);

// var(g) = int int |d^2 g / dx dy| over the rectangle, numerically
double total_variation(const std::function<double(double, double)>& g, double ax,
                       double bx, double ay, double by, int n = 96);

// ------------------------------------------------------------------
// The pipeline's concrete y-integral after Poisson + Voronoi:
//   I(m, nn, q) = int U(y) e(alpha (X y)^beta - X m y / q
//                           +- 3 (X nn (y+u))^{1/3} / q) dy
// with U the fixed plateau window on [1/2, 5/2] (== 1 on [1,2]).
// ------------------------------------------------------------------
struct IntegralIParams {
    int64_t m = 0;
    double nn = 0.0;     // n1^2 n2
    int64_t q = 1;
    double u = 0.0;
    double alpha = 1.0;
    double beta = 0.5;
    double X = 1000.0;
    int sign = +1;       // the +- branch
};

AmplitudeFunction u_window();  // the U(y) amplitude above
PhaseFunction make_I_phase(const IntegralIParams& p);

// stationary phase when a unique interior stationary point exists,
// otherwise quadrature
OscResult eval_I(const IntegralIParams& p, double quad_tol = 1e-9);

// W := int W(w) |I(m, N0 w^3, q)|^2 dw  (W a fixed bump on [1,2]);
// returns W * X^beta, the quantity the L^2 lemma asserts is O(X^eps)
double l2_average_check(int64_t m, double N0, int64_t q, double alpha, double beta,
                        double X, double u = 0.0, int sign = +1);

}  // namespace gl3::osc
