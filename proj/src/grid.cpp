#include "tfa/grid.hpp"

#include <algorithm>
#include <cmath>

namespace tfa {

bool valid_grid_size(int n) {
    if (n < 8) return false;
    return (n & (n - 1)) == 0;
}

void check_grid_size(int n) {
    if (!valid_grid_size(n)) fail("grid size must be a power of two, at least 8");
}

void cutoff_function::validate() const {
    for (int k = 0; k < n; ++k) {
        if (v[k] < -n / 2 || v[k] > n / 2) fail("cutoff value out of range");
    }
}

namespace {

// In-place radix-2 decimation-in-time FFT. sign = -1 gives
// a[j] <- sum_k a[k] e^{-2 pi i jk/n}, sign = +1 the conjugate sum.
void fft_inplace(std::vector<cplx>& a, int sign) {
    const int n = int(a.size());
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const cplx wl = unit_phase(double(sign) / double(len));
        for (int i = 0; i < n; i += len) {
            cplx w(1.0);
            for (int j = 0; j < len / 2; ++j) {
                cplx u = a[i + j];
                cplx t = w * a[i + j + len / 2];
                a[i + j] = u + t;
                a[i + j + len / 2] = u - t;
                w *= wl;
            }
        }
    }
}

}  // namespace

spectrum forward_transform(const grid_function& f) {
    const int n = f.n;
    std::vector<cplx> a = f.v;
    fft_inplace(a, -1);
    // a[j] is the raw coefficient at frequency j mod N; shift to [-N/2, N/2)
    // and apply the 1/N normalization.
    spectrum s(n);
    for (int xi = -n / 2; xi < n / 2; ++xi) {
        int j = xi < 0 ? xi + n : xi;
        s.at(xi) = a[j] / double(n);
    }
    return s;
}

grid_function inverse_transform(const spectrum& s) {
    const int n = s.n;
    std::vector<cplx> a(n, cplx(0.0));
    for (int xi = -n / 2; xi < n / 2; ++xi) {
        int j = xi < 0 ? xi + n : xi;
        a[j] = s.at(xi);
    }
    fft_inplace(a, +1);
    grid_function f(n);
    f.v = std::move(a);
    return f;
}

cplx inner_product(const grid_function& f, const grid_function& g) {
    if (f.n != g.n) fail("inner_product: size mismatch");
    cplx acc(0.0);
    for (int k = 0; k < f.n; ++k) acc += f[k] * std::conj(g[k]);
    return acc / double(f.n);
}

double norm_l2(const grid_function& f) {
    double acc = 0.0;
    for (const cplx& z : f.v) acc += std::norm(z);
    return std::sqrt(acc / double(f.n));
}

double norm_l1(const grid_function& f) {
    double acc = 0.0;
    for (const cplx& z : f.v) acc += std::abs(z);
    return acc / double(f.n);
}

double norm_linf(const grid_function& f) {
    double m = 0.0;
    for (const cplx& z : f.v) m = std::max(m, std::abs(z));
    return m;
}

double norm_l2(const spectrum& s) {
    double acc = 0.0;
    for (const cplx& z : s.c) acc += std::norm(z);
    return std::sqrt(acc);
}

grid_function mode(int n, int xi) {
    grid_function f(n);
    for (int k = 0; k < n; ++k) f[k] = unit_phase(double(k) * double(xi) / double(n));
    return f;
}

grid_function dyadic_maximal(const grid_function& f) {
    const int n = f.n;
    // prefix[k] = sum of |f| over the first k points
    std::vector<double> prefix(n + 1, 0.0);
    for (int k = 0; k < n; ++k) prefix[k + 1] = prefix[k] + std::abs(f[k]);

    grid_function out(n);
    std::vector<double> best(n, 0.0);
    // Widths 2^-l for l = 0..log2(N); width 2^-l covers n >> l sample points.
    for (int width = n; width >= 1; width >>= 1) {
        for (int start = 0; start < n; start += width) {
            double avg = (prefix[start + width] - prefix[start]) / double(width);
            for (int k = start; k < start + width; ++k) best[k] = std::max(best[k], avg);
        }
    }
    for (int k = 0; k < n; ++k) out[k] = best[k];
    return out;
}

}  // namespace tfa
