#include "gl3/exponent_calculus.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace gl3::expcalc {

std::string ExponentExpr::str() const {
    std::ostringstream os;
    os << c0 << " + (" << cb << ")b + (" << ce << ")e";
    return os.str();
}

std::map<std::string, ExponentExpr> RegimeCatalog::entries() const {
    return {{"S0_term1", S0_term1},
            {"S0_term2", S0_term2},
            {"S_small", S_small},
            {"S_large_small_n2", S_large_small_n2},
            {"S_large_large_n2", S_large_large_n2}};
}

RegimeCatalog catalog() {
    RegimeCatalog c;
    c.S0_term1 = {Rat(3, 4), Rat(3, 4), Rat(-3, 4)};
    c.S0_term2 = {Rat(3, 8), Rat(9, 8), Rat(-5, 8)};
    c.S_small = {Rat(3, 4), Rat(1, 4), Rat(-1, 2)};
    c.S_large_small_n2 = {Rat(5, 6), Rat(-2, 3), Rat(2, 3)};
    c.S_large_large_n2 = {Rat(3, 4), Rat(0), Rat(1, 2)};
    return c;
}

Rat total_exponent(const Rat& beta, const Rat& eta) {
    if (beta <= Rat(0) || beta >= Rat(1))
        throw std::domain_error("total_exponent: beta outside (0,1)");
    if (eta <= Rat(0) || eta >= beta)
        throw std::domain_error("total_exponent: eta outside (0,beta)");
    auto c = catalog();
    Rat best = c.S0_term1.eval(beta, eta);
    for (const auto& [name, ex] : c.entries()) best = std::max(best, ex.eval(beta, eta));
    return best;
}

EtaChoice optimize_eta(const Rat& beta) {
    if (beta <= Rat(0) || beta >= Rat(1))
        throw std::domain_error("optimize_eta: beta outside (0,1)");
    auto c = catalog();

    // balance S0_term1 = S_large_large_n2:
    //   3b/4 + 3/4 - 3e/4 = 3/4 + e/2  =>  e = 3b/5
    EtaChoice out;
    out.eta = Rat(3) * beta / Rat(5);
    out.exponent = c.S0_term1.eval(beta, out.eta);
    if (out.exponent != Rat(3, 4) + Rat(3, 10) * beta)
        throw std::logic_error("optimize_eta: balanced exponent mismatch");
    if (c.S_large_large_n2.eval(beta, out.eta) != out.exponent)
        throw std::logic_error("optimize_eta: balance identity failed");

    out.side_condition_ok =
        c.S0_term2.eval(beta, out.eta) <= c.S0_term1.eval(beta, out.eta);
    out.power_saving = out.exponent < Rat(1);
    out.all_regimes_dominated =
        c.S_small.eval(beta, out.eta) <= out.exponent &&
        c.S_large_small_n2.eval(beta, out.eta) <= out.exponent;

    // Where the balanced pair dominates everything, it must be the exact
    // minimizer of the piecewise-linear max; verify by enumerating all
    // decreasing/increasing crossing points.
    if (beta < Rat(5, 6) && !out.side_condition_ok)
        throw std::logic_error("optimize_eta: side condition failed for beta < 5/6");
    if (beta < Rat(5, 6) && out.all_regimes_dominated) {
        std::vector<ExponentExpr> all = {c.S0_term1, c.S0_term2, c.S_small,
                                         c.S_large_small_n2, c.S_large_large_n2};
        Rat best_val(0);
        Rat best_eta(0);
        bool have = false;
        for (const auto& f : all)
            for (const auto& g : all) {
                if (f.ce >= Rat(0) || g.ce <= Rat(0)) continue;  // decreasing vs increasing
                Rat denom = g.ce - f.ce;
                Rat eta = ((f.c0 - g.c0) + (f.cb - g.cb) * beta) / denom;
                if (eta <= Rat(0) || eta >= beta) continue;
                Rat val = total_exponent(beta, eta);
                if (!have || val < best_val) {
                    best_val = val;
                    best_eta = eta;
                    have = true;
                }
            }
        if (!have || best_val != out.exponent || best_eta != out.eta)
            throw std::logic_error(
                "optimize_eta: crossing-point minimizer disagrees with 3b/5");
    }
    return out;
}

DerivedScales derived_scales() {
    DerivedScales d;
    d.K = {Rat(0), Rat(1), Rat(-1)};
    // Q = sqrt(X/K)
    d.Q = (ExponentExpr{Rat(1), Rat(0), Rat(0)} - d.K) * Rat(1, 2);
    // M0 = q X^{beta-1} at q = Q
    d.M0 = d.Q + ExponentExpr{Rat(-1), Rat(1), Rat(0)};
    // N0 = (qK)^3 / X at q = Q (first branch; the x^3 branch is O(1) at the
    // delta method's effective |x| <= L^eps)
    d.N0 = (d.Q + d.K) * Rat(3) - ExponentExpr{Rat(1), Rat(0), Rat(0)};
    // Ntilde = sqrt(XK) C / N0 at C = Q
    d.Ntilde = (ExponentExpr{Rat(1), Rat(0), Rat(0)} + d.K) * Rat(1, 2) + d.Q - d.N0;
    return d;
}

SketchReport sketch_savings(const Rat& beta) {
    if (beta <= Rat(0) || beta >= Rat(1))
        throw std::domain_error("sketch_savings: beta outside (0,1)");
    SketchReport r;
    r.K_exponent = Rat(2) * beta / Rat(5);
    r.window_lo = beta - Rat(1, 2);
    r.window_hi = Rat(1, 3);
    r.window_ok = r.window_lo < r.K_exponent && r.K_exponent < r.window_hi;
    r.total_saving = Rat(5, 4) - Rat(3, 10) * beta;
    r.final_exponent = Rat(2) - r.total_saving;
    r.power_saving = beta < Rat(5, 6);
    return r;
}

}  // namespace gl3::expcalc
