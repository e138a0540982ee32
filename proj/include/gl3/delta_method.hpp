#pragma once
// The divisor-sum form of the DFI delta symbol: for |n| <= L,
//   delta(n) = sum_{d>=1} (1/d) sum_{c mod d} e(cn/d) (omega(d) - omega(|n|/d))
// with omega a smooth bump on [Q/2, Q], Q = 2 sqrt(L), normalized so that
// sum_{d>=1} omega(d) = 1 (a sum over integers, which is what the exact
// cancellation argument uses). The weight g(q,x) of the integral form is
// reconstructed from the expansion for diagnostic property checks only.

#include <complex>
#include <cstdint>
#include <vector>

#include "gl3/util.hpp"

namespace gl3::delta {

struct DeltaExpansion {
    int64_t L = 0;       // detection range |n| <= L
    double Q = 0.0;      // 2 sqrt(L)
    int64_t d_max = 0;   // modulus truncation, >= Q
    Bump omega_raw;      // un-normalized bump on [Q/2, Q]
    double norm = 0.0;   // sum_{d>=1} omega_raw(d)

    double omega(double t) const {
        return t <= 0.0 ? 0.0 : omega_raw(t) / norm;
    }
};

// sharp selects the omega shape (any admissible bump gives the same
// expansion values; tests exercise several)
DeltaExpansion build_delta(int64_t L, double sharp = 3.0);

// numeric value of the expansion at n; equals delta(n) within ~1e-12
double delta_eval(const DeltaExpansion& ex, int64_t n);

// Samples Delta_q(u) = (1/q) sum_{r>=1} (omega(qr) - omega(|u|/(qr)))/r on a
// u-grid (with a smooth wide taper) and evaluates the Fourier-integral
// weight  g(q,x) = int Delta_q(|u|) e(-xu/(qQ)) du. Diagnostic only.
class GWeight {
public:
    GWeight(const DeltaExpansion& ex, int64_t q, double taper_mult = 2.0,
            int n_u = 0);
    double operator()(double x) const;
    // int_{-x_max}^{x_max} g(q,x) dx, cosine factor integrated in closed form
    double integral_dx(double x_max) const;
    double qQ() const { return qq_; }
    size_t size() const { return tab_.size(); }

private:
    double qq_;
    double du_;
    std::vector<double> tab_;  // Delta_q * taper * quadrature weight
};

double g_weight(const DeltaExpansion& ex, int64_t q, double x);

// reconstructs delta(0) = sum_{q<=Q} phi(q)/(qQ) int g(q,x) dx from sampled
// g values; should return 1 up to the x-truncation error
double resynthesize_delta0(const DeltaExpansion& ex, double x_max = 30.0,
                           int nx = 4000);

// Two-sided check of Poisson summation on the m-sum:
//   sum_m m^{-iv} e(alpha m^beta) e(-am/q) e(-mx/(qQ)) U(m/X)
//   = X^{1-iv} sum_{m == a mod q} int U(y) y^{-iv}
//         e(alpha (Xy)^beta - Xxy/(qQ) - Xmy/q) dy
// with U the plateau window on [1/2, 5/2] and Q = sqrt(X).
// Dual frequencies inside the effective range 4 max(qX^{beta-1}, 1/Q) X^eps
// are evaluated by quadrature; the ones beyond it are bounded by
// non-stationarity certificates, and tail_fraction reports that certified
// bound relative to |rhs|.
struct PoissonDualReport {
    std::complex<double> lhs, rhs;
    double rel_err = 0.0;        // |lhs-rhs| / |lhs|
    double tail_fraction = 0.0;  // certified tail bound / |rhs|
    int dual_terms = 0;          // frequencies evaluated by quadrature
};

PoissonDualReport verify_poisson_dual_sum(double alpha, double beta, double X,
                                          int64_t q, int64_t a, double v, double x,
                                          double trunc_eps = 0.05,
                                          int max_members = 0);

}  // namespace gl3::delta
