#pragma once
// Exact complete exponential sums: Kloosterman sums S(a,b;q), Ramanujan
// sums, and the character sum
//   C(m,m',q,q',n1,n2) = sum_{gamma mod qq'/n1^2}
//        S(mbar, gamma; q/n1) S(m'bar, gamma; q'/n1) e(n2 gamma / (qq'/n1^2))
// together with a brute-force scan that verifies its gcd bound and the
// zero-frequency closed form.

#include <complex>
#include <cstdint>
#include <string>

namespace gl3::expsums {

// extended-Euclid modular inverse; throws if gcd(a,q) != 1
int64_t mod_inverse(int64_t a, int64_t q);

int64_t euler_phi(int64_t q);

// S(a,b;q) = sum over invertible x mod q of e((ax + b xbar)/q), by direct
// enumeration with compensated accumulation.
std::complex<double> kloosterman(int64_t a, int64_t b, int64_t q);

// sum over invertible c mod q of e(cn/q); an integer up to rounding
double ramanujan_sum(int64_t n, int64_t q);

struct CharSumParams {
    int64_t m, m_prime;
    int64_t q, q_prime;
    int64_t n1;
    int64_t n2;
};

// direct enumeration of C; validates n1 | q, n1 | q', gcd(m,q) = gcd(m',q') = 1
std::complex<double> char_sum(const CharSumParams& p);

// zero-frequency closed form (q^2/n1^2) * sum*_{c mod q/n1} e(c(m-m')/(q/n1))
std::complex<double> char_sum_zero_freq(int64_t m, int64_t m_prime, int64_t q,
                                        int64_t n1);

struct CharSumScanReport {
    int64_t configurations = 0;
    double max_ratio = 0.0;          // max |C| / ((qq'/n1^2) gcd(q/n1,q'/n1,n2))
    double max_zero_freq_error = 0.0;    // vs closed form, n2 = 0, q = q'
    double max_offdiag_zero = 0.0;       // |C| when n2 = 0, q != q'
    int violations = 0;              // ratio > 1 + 1e-9 counts as a violation
    std::string summary() const;
};

// scan all q,q' <= q_max, n1 | gcd(q,q'), m,m' coprime samples, |n2| <= n2_max
CharSumScanReport verify_char_sum_lemma(int64_t q_max, int64_t n2_max = 20);

}  // namespace gl3::expsums
