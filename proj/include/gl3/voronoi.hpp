#pragma once
// GL(3) Voronoi summation, verified two-sidedly:
//   sum_n lambda(m,n) e(an/q) psi(n)
//     = q pi^{-5/2}/(4i) sum_{+-} sum_{n1|qm} sum_{n2>=1}
//         lambda(n2,n1)/(n1 n2) S(m abar, +-n2; mq/n1)
//         Psi^{+-}(n1^2 n2 / (q^3 m))          [+ residue term, Eisenstein]
// with Psi^{+-} = Psi_0 +- Psi_1/(i pi^3 x) and Psi_k the Mellin-Barnes
// transforms. The transforms are evaluated on a vertical line:
//   Psi_0(x) = int_(sigma) (pi^3 x)^{-s}
//                prod_j Gamma((1+s+be_j)/2)/Gamma((-s+be_j)/2)
//                psitilde(-s) ds,
//   Psi_1(x) = int_(sigma) (pi^3 x)^{-s}
//                prod_j Gamma((2+s+bo_j)/2)/Gamma((-1-s+bo_j)/2)
//                psitilde(-s-1) ds          (ds = i dt along the line),
// where {be_j} / {bo_j} are the Gamma_R shift multisets of the archimedean
// L-factors of pi and pi x sgn. For a spherical even form these reduce to
// be = (alpha_1, alpha_2, alpha_3) and bo = be + 1, which is the classical
// kernel; the symmetric-square lift of the weight-12 form carries
// Gamma_R(s+1) Gamma_C(s+11), i.e. be = (1,11,12), bo = (0,11,12).
// With ds = i dt these conventions make the q = 1 case exactly the (even,
// self-dual) functional equation, which the tests exercise directly.

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "gl3/coefficients.hpp"

namespace gl3::voronoi {

using cdouble = std::complex<double>;

struct SpectralParams {
    std::array<cdouble, 3> alpha;   // Langlands parameters, sum = 0
    std::array<double, 3> even_shifts;
    std::array<double, 3> odd_shifts;

    static SpectralParams eisenstein_tau3();
    static SpectralParams sym2_weight12();
};

// smooth bump supported on [Y, 2Y], peak 1
class TestFunction {
public:
    explicit TestFunction(double y_lo, double y_hi);
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double operator()(double x) const;
    double deriv(double x) const;
    double mass() const;
    double abs_deriv_mass() const;  // int |psi'|

private:
    double lo_, hi_;
};

// Mellin transform psitilde(s) = int psi(x) x^{s-1} dx by quadrature
cdouble mellin(const TestFunction& psi, cdouble s);

struct VoronoiContext {
    const coeffs::HeckeTable* table = nullptr;
    int64_t q = 1;
    int64_t a = 1;       // gcd(a, q) = 1
    int64_t m = 1;
    SpectralParams params;
    TestFunction psi;
    int64_t n2_cut = 0;  // 0: automatic (tail-estimate driven)
    double sigma = 0.5;  // contour real part
};

// single-point transform evaluation (builds a contour grid internally;
// voronoi_rhs amortizes the grid across the whole dual sum)
cdouble psi_k(double x, int k, const VoronoiContext& ctx, double sigma);

cdouble voronoi_lhs(const VoronoiContext& ctx);

struct RhsResult {
    cdouble value{0.0, 0.0};
    cdouble dual_sum{0.0, 0.0};
    cdouble main_term{0.0, 0.0};  // Eisenstein residue at s = 1 (else 0)
    int64_t n2_used = 0;          // largest n2 enumerated (over n1 branches)
    double tail_estimate = 0.0;   // last-decade estimate / |partial|
};

RhsResult voronoi_rhs(const VoronoiContext& ctx);

// |lhs - rhs| / max(|lhs|, 1e-3 sum |lambda psi|)
double voronoi_residual(const VoronoiContext& ctx);

// truncated oscillatory expansion
//   2 pi^4 i x int psi(y) sum_{j<=J} (c_j cos + d_j sin)(6 pi (xy)^{1/3})
//                         / (pi^3 x y)^{j/3} dy
cdouble psi0_asymptotic(double x, int J, const VoronoiContext& ctx,
                        const std::vector<std::pair<double, double>>& coeffs);

struct Psi0Fit {
    double c1 = 0.0, d1 = 0.0;
    double max_rel_residual = 0.0;   // over the fitted samples
    double residual_slope = 0.0;     // d log|Psi0 - fit| / d log(xY)
};

// least-squares fit of (c1, d1) against the contour-integral oracle over
// samples with xY in [xy_lo, xy_hi]
Psi0Fit fit_psi0_leading(const VoronoiContext& ctx, double xy_lo = 1e2,
                         double xy_hi = 1e4, int samples = 24);

// Hurwitz zeta (Euler-Maclaurin), 0 < a <= 1, s != 1
cdouble hurwitz_zeta(cdouble s, double a);

// residue at s = 1 of q^{-3s} sum_{u,v,w mod q} e(a uvw/q)
// zeta(s,u/q) zeta(s,v/q) zeta(s,w/q) psitilde(s)  -- the main term the
// triple-divisor (Eisenstein) twisted sum acquires
cdouble eisenstein_main_term(int64_t q, int64_t a, const TestFunction& psi);

}  // namespace gl3::voronoi
