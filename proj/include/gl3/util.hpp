#pragma once
// Shared small utilities: compensated summation, smooth test functions,
// a chunked parallel-for, and 128-bit helpers.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace gl3 {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

// e(x) = exp(2*pi*i*x)
inline std::complex<double> e_of(double x) {
    double a = kTwoPi * x;
    return {std::cos(a), std::sin(a)};
}

// Kahan compensated accumulator; works for double and complex<double>.
template <class T>
struct Kahan {
    T s{};
    T c{};
    void add(const T& x) {
        T y = x - c;
        T t = s + y;
        c = (t - s) - y;
        s = t;
    }
    const T& sum() const { return s; }
};

// exp(-1/t) for t > 0, else 0.
inline double exp_ramp(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// C-infinity bump supported on (lo, hi), peak value 1 at the midpoint:
//   b(x) = exp(sharp * (1 - 1/(1-u^2))),  u = (2x - lo - hi)/(hi - lo).
// sharp > 0 selects among admissible shapes (all vanish to infinite order
// at the endpoints).
struct Bump {
    double lo = 1.0;
    double hi = 2.0;
    double sharp = 1.0;

    double operator()(double x) const {
        double u = (2.0 * x - lo - hi) / (hi - lo);
        if (u <= -1.0 || u >= 1.0) return 0.0;
        return std::exp(sharp * (1.0 - 1.0 / (1.0 - u * u)));
    }
    double deriv(double x) const {
        double u = (2.0 * x - lo - hi) / (hi - lo);
        if (u <= -1.0 || u >= 1.0) return 0.0;
        double g = 1.0 - u * u;
        return (*this)(x) * sharp * (-2.0 * u / (g * g)) * (2.0 / (hi - lo));
    }
    // mass = integral over the support (composite Simpson; bump is smooth)
    double mass(int n = 2048) const {
        double h = (hi - lo) / n;
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            double a = lo + i * h;
            s += h / 6.0 * ((*this)(a) + 4.0 * (*this)(a + 0.5 * h) + (*this)(a + h));
        }
        return s;
    }
};

// smoothstep: 0 for t<=0, 1 for t>=1, C-infinity in between
inline double smoothstep(double t) {
    double a = exp_ramp(t);
    double b = exp_ramp(1.0 - t);
    return a / (a + b);
}

// C-infinity window supported on (lo, hi), identically 1 on [flat_lo, flat_hi].
struct PlateauBump {
    double lo, flat_lo, flat_hi, hi;

    double operator()(double x) const {
        if (x <= lo || x >= hi) return 0.0;
        double v = 1.0;
        if (x < flat_lo) v *= smoothstep((x - lo) / (flat_lo - lo));
        if (x > flat_hi) v *= smoothstep((hi - x) / (hi - flat_hi));
        return v;
    }
};

// Chunked parallel for over [begin, end); fn(lo, hi) handles one chunk.
// Falls back to a serial call when the range is small.
inline void parallel_chunks(int64_t begin, int64_t end,
                            const std::function<void(int64_t, int64_t)>& fn,
                            int64_t min_grain = 1 << 14) {
    int64_t n = end - begin;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw < 2 || n < 2 * min_grain) {
        fn(begin, end);
        return;
    }
    unsigned nt = hw;
    std::vector<std::thread> pool;
    int64_t chunk = (n + nt - 1) / nt;
    for (unsigned t = 0; t < nt; ++t) {
        int64_t lo = begin + t * chunk;
        int64_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, lo, hi);
    }
    for (auto& th : pool) th.join();
}

// int128 -> double without losing the high bits to UB
inline double i128_to_double(__int128_t x) {
    bool neg = x < 0;
    unsigned __int128 u = neg ? (unsigned __int128)(-x) : (unsigned __int128)x;
    double hi = (double)(uint64_t)(u >> 64);
    double lo = (double)(uint64_t)u;
    double r = hi * 18446744073709551616.0 + lo;
    return neg ? -r : r;
}

inline std::string i128_to_string(__int128_t x) {
    if (x == 0) return "0";
    bool neg = x < 0;
    unsigned __int128 u = neg ? (unsigned __int128)(-x) : (unsigned __int128)x;
    std::string s;
    while (u) {
        s += char('0' + (int)(u % 10));
        u /= 10;
    }
    if (neg) s += '-';
    return {s.rbegin(), s.rend()};
}

}  // namespace gl3
