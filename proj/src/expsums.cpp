#include "gl3/expsums.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gl3/util.hpp"

namespace gl3::expsums {

int64_t mod_inverse(int64_t a, int64_t q) {
    if (q < 1) throw std::invalid_argument("mod_inverse: q < 1");
    if (q == 1) return 0;
    int64_t r0 = q, r1 = ((a % q) + q) % q;
    int64_t t0 = 0, t1 = 1;
    while (r1 != 0) {
        int64_t d = r0 / r1;
        int64_t r2 = r0 - d * r1;
        int64_t t2 = t0 - d * t1;
        r0 = r1; r1 = r2;
        t0 = t1; t1 = t2;
    }
    if (r0 != 1) throw std::invalid_argument("mod_inverse: argument not invertible");
    return ((t0 % q) + q) % q;
}

int64_t euler_phi(int64_t q) {
    int64_t result = q;
    for (int64_t p = 2; p * p <= q; ++p) {
        if (q % p == 0) {
            while (q % p == 0) q /= p;
            result -= result / p;
        }
    }
    if (q > 1) result -= result / q;
    return result;
}

static int64_t reduce(int64_t a, int64_t q) { return ((a % q) + q) % q; }

std::complex<double> kloosterman(int64_t a, int64_t b, int64_t q) {
    if (q < 1) throw std::invalid_argument("kloosterman: q must be >= 1");
    if (q == 1) return {1.0, 0.0};  // single residue x = 0, e(0) = 1
    a = reduce(a, q);
    b = reduce(b, q);
    Kahan<std::complex<double>> acc;
    for (int64_t x = 1; x < q; ++x) {
        if (std::gcd(x, q) != 1) continue;
        int64_t xbar = mod_inverse(x, q);
        int64_t num = (a * x + b * xbar) % q;  // exact residue, lossless angle
        acc.add(e_of((double)num / (double)q));
    }
    return acc.sum();
}

double ramanujan_sum(int64_t n, int64_t q) {
    if (q < 1) throw std::invalid_argument("ramanujan_sum: q must be >= 1");
    if (q == 1) return 1.0;
    n = reduce(n, q);
    Kahan<double> acc;
    for (int64_t c = 1; c < q; ++c) {
        if (std::gcd(c, q) != 1) continue;
        acc.add(std::cos(kTwoPi * (double)(c * n % q) / (double)q));
    }
    return acc.sum();
}

std::complex<double> char_sum(const CharSumParams& p) {
    if (p.q < 1 || p.q_prime < 1 || p.n1 < 1)
        throw std::invalid_argument("char_sum: moduli must be >= 1");
    if (p.q % p.n1 != 0 || p.q_prime % p.n1 != 0)
        throw std::invalid_argument("char_sum: n1 must divide q and q'");
    if (std::gcd(reduce(p.m, p.q), p.q) != 1 && p.q > 1)
        throw std::invalid_argument("char_sum: gcd(m,q) != 1");
    if (std::gcd(reduce(p.m_prime, p.q_prime), p.q_prime) != 1 && p.q_prime > 1)
        throw std::invalid_argument("char_sum: gcd(m',q') != 1");

    const int64_t qa = p.q / p.n1;
    const int64_t qb = p.q_prime / p.n1;
    const int64_t mod = (p.q * p.q_prime) / (p.n1 * p.n1);
    const int64_t mbar = qa == 1 ? 0 : mod_inverse(p.m, qa);
    const int64_t mpbar = qb == 1 ? 0 : mod_inverse(p.m_prime, qb);
    const int64_t n2r = reduce(p.n2, mod);

    Kahan<std::complex<double>> acc;
    for (int64_t g = 0; g < mod; ++g) {
        std::complex<double> term =
            kloosterman(mbar, g, qa) * kloosterman(mpbar, g, qb);
        term *= e_of((double)(n2r * g % mod) / (double)mod);
        acc.add(term);
    }
    return acc.sum();
}

std::complex<double> char_sum_zero_freq(int64_t m, int64_t m_prime, int64_t q,
                                        int64_t n1) {
    if (n1 < 1 || q < 1 || q % n1 != 0)
        throw std::invalid_argument("char_sum_zero_freq: n1 must divide q");
    if (std::gcd(reduce(m, q), q) != 1 && q > 1)
        throw std::invalid_argument("char_sum_zero_freq: gcd(m,q) != 1");
    if (std::gcd(reduce(m_prime, q), q) != 1 && q > 1)
        throw std::invalid_argument("char_sum_zero_freq: gcd(m',q) != 1");
    double scale = ((double)q * (double)q) / ((double)n1 * (double)n1);
    return {scale * ramanujan_sum(m - m_prime, q / n1), 0.0};
}

std::string CharSumScanReport::summary() const {
    char buf[256];
    snprintf(buf, sizeof buf,
             "charsum scan: %lld configs, max ratio %.12f, zero-freq err %.3e, "
             "offdiag |C| %.3e, violations %d",
             (long long)configurations, max_ratio, max_zero_freq_error,
             max_offdiag_zero, violations);
    return buf;
}

CharSumScanReport verify_char_sum_lemma(int64_t q_max, int64_t n2_max) {
    CharSumScanReport rep;
    for (int64_t q = 1; q <= q_max; ++q) {
        for (int64_t qp = 1; qp <= q_max; ++qp) {
            int64_t g = std::gcd(q, qp);
            for (int64_t n1 = 1; n1 <= g; ++n1) {
                if (g % n1 != 0) continue;
                for (int64_t m = 1; m <= std::min<int64_t>(q, 3); ++m) {
                    if (std::gcd(m, q) != 1) continue;
                    for (int64_t mp = 1; mp <= std::min<int64_t>(qp, 3); ++mp) {
                        if (std::gcd(mp, qp) != 1) continue;
                        for (int64_t n2 = -n2_max; n2 <= n2_max; ++n2) {
                            CharSumParams p{m, mp, q, qp, n1, n2};
                            auto c = char_sum(p);
                            rep.configurations++;
                            double bound =
                                ((double)q * qp / ((double)n1 * n1)) *
                                (double)std::gcd(std::gcd(q / n1, qp / n1),
                                                 std::llabs(n2));
                            double ratio = std::abs(c) / bound;
                            rep.max_ratio = std::max(rep.max_ratio, ratio);
                            if (ratio > 1.0 + 1e-9) rep.violations++;
                            if (n2 == 0) {
                                if (q == qp) {
                                    auto cf = char_sum_zero_freq(m, mp, q, n1);
                                    rep.max_zero_freq_error = std::max(
                                        rep.max_zero_freq_error, std::abs(c - cf));
                                } else {
                                    rep.max_offdiag_zero =
                                        std::max(rep.max_offdiag_zero, std::abs(c));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    return rep;
}

}  // namespace gl3::expsums
