#pragma once
// Arithmetic input streams for the twisted sums:
//   - exact Ramanujan tau(n) via the eta-product expansion,
//   - normalized GL(2) Hecke eigenvalues lambda_f(p) = tau(p)/p^{11/2},
//   - the GL(3) coefficient arrays lambda(m,n) for the symmetric-square
//     lift of Delta and for the triple-divisor Eisenstein analogue tau_3,
//   - the Rankin-Selberg style average A(x) = sum_{n1^2 n2 <= x} lambda^2.

#include <cstdint>
#include <memory>
#include <vector>

namespace gl3::coeffs {

using int128 = __int128_t;

// Exact tau(1..max_n). Delta = q * prod_k (1-q^k)^24 is computed as the 8th
// power of Jacobi's sparse series eta^3 = sum_{k>=0} (-1)^k (2k+1) q^{k(k+1)/2},
// by repeated truncated multiplication. All arithmetic is wrap-around
// 128-bit; the results are exact integers because |tau(n)| <= d(n) n^{11/2}
// stays below 2^127 throughout the supported range.
class TauCache {
public:
    // Supported range is capped where the 128-bit exactness argument holds
    // (d(n) n^{11/2} < 2^127 requires n <= ~2.5e6).
    static constexpr int64_t kCapacity = 2'500'000;

    explicit TauCache(int64_t max_n);

    int64_t max_n() const { return max_n_; }
    int128 tau(int64_t n) const;      // exact integer
    double tau_d(int64_t n) const;    // double rendering of tau(n)

private:
    int64_t max_n_;
    std::vector<unsigned __int128> coef_;  // two's-complement tau(n) at index n-1
};

// lambda_f(p) = tau(p) / p^{11/2}; requires p prime and p <= cache.max_n().
// Asserts the Deligne bound |lambda_f(p)| <= 2.
double gl2_eigenvalue(int64_t p, const TauCache& cache);

enum class Kind { Sym2Delta, EisensteinTau3 };

// GL(3) Hecke coefficient table lambda(m,n), 1 <= m <= max_m, 1 <= n <= max_n.
// Values are assembled multiplicatively from prime-power data; at a prime p
// the local values come from the complete homogeneous symmetric functions
// h_k of the Satake triple {alpha_p^2, 1, alpha_p^-2} via
//   lambda(p^a, p^b) = h_{a+b} h_b - h_{a+b+1} h_{b-1}
// (Jacobi-Trudi for the partition (a+b, b, 0)). The recursion uses only
//   e1 = e2 = lambda_f(p)^2 - 1, e3 = 1
// for the sym^2 lift, and e1 = e2 = 3, e3 = 1 for tau_3.
class HeckeTable {
public:
    HeckeTable(Kind kind, int64_t max_m, int64_t max_n);

    Kind kind() const { return kind_; }
    int64_t max_m() const { return max_m_; }
    int64_t max_n() const { return max_n_; }

    // lambda(m,n); throws std::out_of_range outside the table dimensions.
    double lambda(int64_t m, int64_t n) const;

    // dense first row lambda(1,n), index n (entry 0 unused)
    const std::vector<double>& first_row() const { return first_row_; }

private:
    double local_factor(int64_t p, int a, int b) const;

    Kind kind_;
    int64_t max_m_, max_n_;
    std::vector<int32_t> spf_;   // smallest prime factor sieve
    std::vector<double> e1_;     // e1 at prime indices
    std::vector<double> first_row_;
};

HeckeTable build_sym2_table(int64_t max_m, int64_t max_n);
HeckeTable build_tau3_table(int64_t max_m, int64_t max_n);

// tau_3(n) for n <= max_n by direct divisor sieve (independent oracle for
// the EisensteinTau3 table).
std::vector<int64_t> sieve_tau3(int64_t max_n);

// A(x) = sum_{n1^2 n2 <= x} |lambda(n1,n2)|^2
double ramanujan_average(const HeckeTable& table, double x);

}  // namespace gl3::coeffs
