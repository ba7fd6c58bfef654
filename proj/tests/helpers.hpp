#pragma once

#include <cmath>

#include "tfa/common.hpp"
#include "tfa/grid.hpp"

namespace tfa::testing {

inline grid_function random_function(int n, rng_stream& rng) {
    grid_function f(n);
    for (int k = 0; k < n; ++k) {
        f[k] = cplx(2.0 * rng.next_unit() - 1.0, 2.0 * rng.next_unit() - 1.0);
    }
    return f;
}

// Direct O(N^2) transform, kept deliberately separate from the library path.
inline spectrum dft_oracle(const grid_function& f) {
    spectrum s(f.n);
    for (int xi = -f.n / 2; xi < f.n / 2; ++xi) {
        cplx acc(0.0);
        for (int k = 0; k < f.n; ++k) {
            double angle = -2.0 * pi * f.x(k) * double(xi);
            acc += f[k] * cplx(std::cos(angle), std::sin(angle));
        }
        s.at(xi) = acc / double(f.n);
    }
    return s;
}

inline double max_abs_diff(const grid_function& a, const grid_function& b) {
    double m = 0.0;
    for (int k = 0; k < a.n; ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

inline double max_abs_diff(const spectrum& a, const spectrum& b) {
    double m = 0.0;
    for (int i = 0; i < a.n; ++i) m = std::max(m, std::abs(a.c[i] - b.c[i]));
    return m;
}

}  // namespace tfa::testing
