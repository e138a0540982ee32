#include "gl3/coefficients.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "gl3/util.hpp"

namespace gl3::coeffs {

namespace {

using u128 = unsigned __int128;

struct SparseTerm {
    int64_t off;
    int64_t coef;
};

// eta^3 = sum_{k>=0} (-1)^k (2k+1) q^{k(k+1)/2}, truncated at degree n_max
std::vector<SparseTerm> eta3_terms(int64_t n_max) {
    std::vector<SparseTerm> t;
    for (int64_t k = 0;; ++k) {
        int64_t off = k * (k + 1) / 2;
        if (off > n_max) break;
        t.push_back({off, (k % 2 == 0) ? (2 * k + 1) : -(2 * k + 1)});
    }
    return t;
}

// out = in * eta^3 truncated at degree N, wrap-around arithmetic.
template <class Word>
void mul_eta3(std::vector<Word>& out, const std::vector<Word>& in,
              const std::vector<SparseTerm>& terms, int64_t N) {
    std::fill(out.begin(), out.end(), Word(0));
    parallel_chunks(0, N + 1, [&](int64_t lo, int64_t hi) {
        for (const auto& t : terms) {
            if (t.off > hi - 1) continue;
            int64_t start = std::max(lo, t.off);
            if (t.coef >= 0) {
                Word c = (Word)(uint64_t)t.coef;
                for (int64_t n = start; n < hi; ++n) out[n] += in[n - t.off] * c;
            } else {
                Word c = (Word)(uint64_t)(-t.coef);
                for (int64_t n = start; n < hi; ++n) out[n] -= in[n - t.off] * c;
            }
        }
    });
}

}  // namespace

TauCache::TauCache(int64_t max_n) : max_n_(max_n) {
    if (max_n < 1 || max_n > 10'000'000)
        throw std::invalid_argument("TauCache: max_n out of range [1, 1e7]");
    if (max_n > kCapacity)
        throw std::length_error(
            "TauCache: max_n exceeds the exact-arithmetic capacity (" +
            std::to_string(kCapacity) + ")");

    const int64_t N = max_n - 1;  // degree in the eta^24 series
    auto terms = eta3_terms(N);

    // eta^6 = (eta^3)^2 by direct sparse-sparse convolution (64-bit range)
    std::vector<uint64_t> a(N + 1, 0), b(N + 1, 0);
    for (const auto& ti : terms)
        for (const auto& tj : terms) {
            int64_t off = ti.off + tj.off;
            if (off > N) break;
            a[off] += (uint64_t)(ti.coef * tj.coef);
        }

    // eta^9, eta^12 still fit in 64-bit words (weight-6 coefficients are
    // O(d(n) n^{5/2}) < 2^63 in this range)
    mul_eta3(b, a, terms, N);
    mul_eta3(a, b, terms, N);

    // promote and finish eta^15, eta^18, eta^21, eta^24 in 128-bit words
    std::vector<u128> wa(N + 1), wb(N + 1);
    for (int64_t i = 0; i <= N; ++i) {
        int64_t v = (int64_t)a[i];  // two's complement reinterpretation
        wa[i] = (u128)(__int128_t)v;
    }
    mul_eta3(wb, wa, terms, N);
    mul_eta3(wa, wb, terms, N);
    mul_eta3(wb, wa, terms, N);
    mul_eta3(wa, wb, terms, N);

    coef_ = std::move(wa);

    // integrity guard: Hecke identities on exact integers catch any
    // overflow of the wrap-around representation
    if (max_n_ >= 8) {
        if (tau(1) != 1 || tau(2) != -24 || tau(3) != 252 || tau(4) != -1472)
            throw std::logic_error("TauCache: small tau values wrong");
        std::mt19937_64 rng(12345);
        for (int trial = 0; trial < 64; ++trial) {
            int64_t m = 2 + (int64_t)(rng() % (uint64_t)std::min<int64_t>(997, max_n_ / 2));
            int64_t n = 2 + (int64_t)(rng() % (uint64_t)(max_n_ / m - 1));
            if (std::gcd(m, n) != 1) continue;
            if (tau(m * n) != tau(m) * tau(n))
                throw std::logic_error("TauCache: multiplicativity check failed");
        }
    }
}

int128 TauCache::tau(int64_t n) const {
    if (n < 1 || n > max_n_) throw std::out_of_range("TauCache::tau: n out of range");
    return (int128)coef_[n - 1];
}

double TauCache::tau_d(int64_t n) const { return i128_to_double(tau(n)); }

double gl2_eigenvalue(int64_t p, const TauCache& cache) {
    if (p < 2) throw std::invalid_argument("gl2_eigenvalue: p not prime");
    for (int64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) throw std::invalid_argument("gl2_eigenvalue: p not prime");
    if (p > cache.max_n()) throw std::out_of_range("gl2_eigenvalue: p beyond cache");
    long double lam = (long double)cache.tau_d(p) / powl((long double)p, 5.5L);
    if (!(fabsl(lam) <= 2.0L + 1e-12L))
        throw std::logic_error("gl2_eigenvalue: Deligne bound violated (bug)");
    return (double)lam;
}

namespace {

std::vector<int32_t> spf_sieve(int64_t n) {
    std::vector<int32_t> spf(n + 1, 0);
    for (int64_t i = 2; i <= n; ++i) {
        if (spf[i] == 0)
            for (int64_t j = i; j <= n; j += i)
                if (spf[j] == 0) spf[j] = (int32_t)i;
    }
    return spf;
}

// h_k from h_j = e1 h_{j-1} - e1 h_{j-2} + h_{j-3}, h_0 = 1, h_{<0} = 0
double hk(double e1, int k) {
    if (k < 0) return 0.0;
    double h0 = 1.0, h1 = 0.0, h2 = 0.0;  // h_{j}, h_{j-1}, h_{j-2}
    for (int j = 1; j <= k; ++j) {
        double h = e1 * (h0 - h1) + h2;
        h2 = h1;
        h1 = h0;
        h0 = h;
    }
    return h0;
}

}  // namespace

HeckeTable::HeckeTable(Kind kind, int64_t max_m, int64_t max_n)
    : kind_(kind), max_m_(max_m), max_n_(max_n) {
    if (max_m < 1 || max_n < 1)
        throw std::invalid_argument("HeckeTable: dimensions must be >= 1");
    int64_t N = std::max(max_m, max_n);
    spf_ = spf_sieve(N);
    e1_.assign(N + 1, 0.0);

    if (kind == Kind::Sym2Delta) {
        TauCache cache(std::max<int64_t>(N, 2));
        for (int64_t p = 2; p <= N; ++p)
            if (spf_[p] == (int32_t)p) {
                double lf = gl2_eigenvalue(p, cache);
                e1_[p] = lf * lf - 1.0;
            }
    } else {
        for (int64_t p = 2; p <= N; ++p)
            if (spf_[p] == (int32_t)p) e1_[p] = 3.0;
    }

    first_row_.assign(max_n + 1, 0.0);
    if (max_n >= 1) first_row_[1] = 1.0;
    for (int64_t n = 2; n <= max_n; ++n) {
        int64_t p = spf_[n], m = n;
        int a = 0;
        while (m % p == 0) {
            m /= p;
            ++a;
        }
        first_row_[n] = first_row_[m] * hk(e1_[p], a);
    }
}

double HeckeTable::local_factor(int64_t p, int a, int b) const {
    double e1 = e1_[p];
    return hk(e1, a + b) * hk(e1, b) - hk(e1, a + b + 1) * hk(e1, b - 1);
}

double HeckeTable::lambda(int64_t m, int64_t n) const {
    if (m < 1 || m > max_m_ || n < 1 || n > max_n_)
        throw std::out_of_range("HeckeTable::lambda: (m,n) outside table");
    if (m == 1) return first_row_[n];
    double val = 1.0;
    // merge the factorizations of m and n prime by prime
    while (m > 1 || n > 1) {
        int64_t pm = m > 1 ? spf_[m] : INT64_MAX;
        int64_t pn = n > 1 ? spf_[n] : INT64_MAX;
        int64_t p = std::min(pm, pn);
        int a = 0, b = 0;
        while (m % p == 0) {
            m /= p;
            ++a;
        }
        while (n % p == 0) {
            n /= p;
            ++b;
        }
        val *= local_factor(p, a, b);
    }
    return val;
}

HeckeTable build_sym2_table(int64_t max_m, int64_t max_n) {
    return HeckeTable(Kind::Sym2Delta, max_m, max_n);
}
HeckeTable build_tau3_table(int64_t max_m, int64_t max_n) {
    return HeckeTable(Kind::EisensteinTau3, max_m, max_n);
}

std::vector<int64_t> sieve_tau3(int64_t max_n) {
    std::vector<int64_t> d2(max_n + 1, 0), d3(max_n + 1, 0);
    for (int64_t a = 1; a <= max_n; ++a)
        for (int64_t b = a; b <= max_n; b += a) d2[b]++;
    for (int64_t a = 1; a <= max_n; ++a)
        for (int64_t b = a; b <= max_n; b += a) d3[b] += d2[b / a];
    return d3;
}

double ramanujan_average(const HeckeTable& table, double x) {
    if (x < 1.0) return 0.0;
    int64_t n1max = (int64_t)std::sqrt(x);
    while ((double)(n1max + 1) * (double)(n1max + 1) <= x) ++n1max;
    if (n1max > table.max_m() || (int64_t)x > table.max_n())
        throw std::out_of_range("ramanujan_average: table too small for x");
    Kahan<double> acc;
    for (int64_t n1 = 1; n1 <= n1max; ++n1) {
        int64_t n2max = (int64_t)(x / ((double)n1 * (double)n1));
        for (int64_t n2 = 1; n2 <= n2max; ++n2) {
            double l = table.lambda(n1, n2);
            acc.add(l * l);
        }
    }
    return acc.sum();
}

}  // namespace gl3::coeffs
