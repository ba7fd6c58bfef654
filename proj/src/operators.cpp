#include "tfa/operators.hpp"

#include <algorithm>
#include <cmath>

namespace tfa {

namespace {

std::vector<cplx> phase_table(int n) {
    std::vector<cplx> ph(n);
    for (int t = 0; t < n; ++t) ph[t] = unit_phase(double(t) / n);
    return ph;
}

int fold_mod(int s, int n) { return ((s % n) + n) % n; }

// index of xi - shift wrapped back into [-n/2, n/2)
int wrap_xi(int xi, int shift, int n) { return fold_mod(xi - shift + n / 2, n) - n / 2; }

void check_same_grid(int a, int b) { require(a == b, "grid sizes differ"); }

// Running partial sums of the pair series at one output point: after feeding
// row xi2 the accumulator holds sum over {xi1 < xi2' <= xi2}.
struct pair_prefix {
    cplx row_prefix{0.0};  // sum of f1 terms with xi1 < current row
    cplx acc{0.0};

    void feed(cplx term1, cplx term2_scaled) {
        acc += term2_scaled * row_prefix;
        row_prefix += term1;
    }
};

}  // namespace

grid_function carleson_apply(const spectrum& f, const cutoff_function& cutoff) {
    check_same_grid(f.n, cutoff.n);
    cutoff.validate();
    const int n = f.n;
    auto ph = phase_table(n);
    grid_function out(n);
    for (int k = 0; k < n; ++k) {
        cplx acc(0.0);
        for (int xi = -n / 2; xi < cutoff[k]; ++xi) {
            acc += f.at(xi) * ph[fold_mod(k * xi, n)];
        }
        out[k] = acc;
    }
    return out;
}

grid_function carleson_maximal(const spectrum& f) {
    const int n = f.n;
    auto ph = phase_table(n);
    grid_function out(n);
    for (int k = 0; k < n; ++k) {
        cplx acc(0.0);
        double best = 0.0;  // the empty prefix, cutoff -N/2
        for (int xi = -n / 2; xi < n / 2; ++xi) {
            acc += f.at(xi) * ph[fold_mod(k * xi, n)];
            best = std::max(best, std::abs(acc));
        }
        out[k] = best;
    }
    return out;
}

grid_function bht_apply(const spectrum& f1, const spectrum& f2) {
    check_same_grid(f1.n, f2.n);
    const int n = f1.n;
    auto ph = phase_table(n);
    grid_function out(n);
    for (int k = 0; k < n; ++k) {
        pair_prefix p;
        for (int xi = -n / 2; xi < n / 2; ++xi) {
            cplx e = ph[fold_mod(k * xi, n)];
            p.feed(f1.at(xi) * e, f2.at(xi) * e);
        }
        out[k] = p.acc;
    }
    return out;
}

grid_function bicarleson_apply(const spectrum& f1, const spectrum& f2,
                               const cutoff_function& cutoff) {
    check_same_grid(f1.n, f2.n);
    check_same_grid(f1.n, cutoff.n);
    cutoff.validate();
    const int n = f1.n;
    auto ph = phase_table(n);
    grid_function out(n);
    for (int k = 0; k < n; ++k) {
        pair_prefix p;
        for (int xi = -n / 2; xi < cutoff[k]; ++xi) {
            cplx e = ph[fold_mod(k * xi, n)];
            p.feed(f1.at(xi) * e, f2.at(xi) * e);
        }
        out[k] = p.acc;
    }
    return out;
}

grid_function bicarleson_maximal(const spectrum& f1, const spectrum& f2) {
    check_same_grid(f1.n, f2.n);
    const int n = f1.n;
    auto ph = phase_table(n);
    grid_function out(n);
    for (int k = 0; k < n; ++k) {
        pair_prefix p;
        double best = 0.0;
        for (int xi = -n / 2; xi < n / 2; ++xi) {
            cplx e = ph[fold_mod(k * xi, n)];
            p.feed(f1.at(xi) * e, f2.at(xi) * e);
            best = std::max(best, std::abs(p.acc));
        }
        out[k] = best;
    }
    return out;
}

grid_function multiplier_apply(const symbol2d& m, const spectrum& f1, const spectrum& f2) {
    check_same_grid(m.n, f1.n);
    check_same_grid(m.n, f2.n);
    const int n = m.n;
    // weight and folded antidiagonal index per frequency pair
    std::vector<cplx> w(size_t(n) * n);
    std::vector<int> sidx(size_t(n) * n);
    size_t idx = 0;
    for (int xi2 = -n / 2; xi2 < n / 2; ++xi2) {
        for (int xi1 = -n / 2; xi1 < n / 2; ++xi1, ++idx) {
            w[idx] = m.at(xi1, xi2) * f1.at(xi1) * f2.at(xi2);
            sidx[idx] = fold_mod(xi1 + xi2, n);
        }
    }
    auto ph = phase_table(n);
    std::vector<cplx> phk(n);
    grid_function out(n);
    for (int k = 0; k < n; ++k) {
        for (int s = 0; s < n; ++s) phk[s] = ph[(k * s) % n];
        cplx acc(0.0);
        for (size_t i = 0; i < w.size(); ++i) acc += w[i] * phk[sidx[i]];
        out[k] = acc;
    }
    return out;
}

grid_function maximal_modulated_apply(const symbol2d& m, const spectrum& f1, const spectrum& f2) {
    check_same_grid(m.n, f1.n);
    check_same_grid(m.n, f2.n);
    const int n = m.n;
    grid_function out(n);
    for (int n1 = -n / 2; n1 < n / 2; ++n1) {
        for (int n2 = -n / 2; n2 < n / 2; ++n2) {
            spectrum g(n);
            for (int xi2 = -n / 2; xi2 < n / 2; ++xi2) {
                for (int xi1 = -n / 2; xi1 < n / 2; ++xi1) {
                    cplx mv = m.at(wrap_xi(xi1, n1, n), wrap_xi(xi2, n2, n));
                    if (mv == cplx(0.0)) continue;
                    g.c[fold_mod(xi1 + xi2 + n / 2, n)] += mv * f1.at(xi1) * f2.at(xi2);
                }
            }
            grid_function t = inverse_transform(g);
            for (int k = 0; k < n; ++k) out[k] = std::max(out[k].real(), std::abs(t[k]));
        }
    }
    return out;
}

grid_function fft_fast_path(const symbol2d& m, const spectrum& f1, const spectrum& f2) {
    check_same_grid(m.n, f1.n);
    check_same_grid(m.n, f2.n);
    const int n = m.n;
    if (m.sup_abs() == 0.0) return grid_function(n);
    spectrum g(n);
    for (int xi2 = -n / 2; xi2 < n / 2; ++xi2) {
        for (int xi1 = -n / 2; xi1 < n / 2; ++xi1) {
            g.c[fold_mod(xi1 + xi2 + n / 2, n)] += m.at(xi1, xi2) * f1.at(xi1) * f2.at(xi2);
        }
    }
    return inverse_transform(g);
}

grid_function fft_fast_path(const symbol2d& m, const spectrum& f1, const spectrum& f2,
                            const cutoff_function& cutoffs) {
    check_same_grid(m.n, f1.n);
    check_same_grid(m.n, f2.n);
    check_same_grid(m.n, cutoffs.n);
    cutoffs.validate();
    const int n = m.n;
    grid_function out(n);
    if (m.sup_abs() == 0.0) return out;

    // points grouped by cutoff value, processed in increasing order so the
    // folded cone restriction grows one xi2 row at a time
    std::vector<std::vector<int>> by_value(n + 1);
    for (int k = 0; k < n; ++k) by_value[cutoffs[k] + n / 2].push_back(k);

    spectrum g(n);
    int row = -n / 2;
    for (int vi = 0; vi <= n; ++vi) {
        if (by_value[vi].empty()) continue;
        int cut = vi - n / 2;
        for (; row < cut; ++row) {
            for (int xi1 = -n / 2; xi1 < row; ++xi1) {
                g.c[fold_mod(xi1 + row + n / 2, n)] += m.at(xi1, row) * f1.at(xi1) * f2.at(row);
            }
        }
        grid_function slice = inverse_transform(g);
        for (int k : by_value[vi]) out[k] = slice[k];
    }
    return out;
}

}  // namespace tfa
