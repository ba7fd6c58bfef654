#pragma once

#include <vector>

#include "tfa/common.hpp"

namespace tfa {

// N-point torus, N = 2^L with L >= 3. Sample points x_k = k/N, frequencies
// are the integers in [-N/2, N/2).
bool valid_grid_size(int n);
void check_grid_size(int n);

// Samples f(x_0), ..., f(x_{N-1}).
struct grid_function {
    int n = 0;
    std::vector<cplx> v;

    grid_function() = default;
    explicit grid_function(int n_) : n(n_), v(n_, cplx(0.0)) { check_grid_size(n_); }

    double x(int k) const { return double(k) / double(n); }
    cplx& operator[](int k) { return v[k]; }
    const cplx& operator[](int k) const { return v[k]; }
};

// Fourier coefficients indexed by integer frequency xi in [-N/2, N/2).
struct spectrum {
    int n = 0;
    std::vector<cplx> c;  // c[i] is the coefficient at xi = i - n/2

    spectrum() = default;
    explicit spectrum(int n_) : n(n_), c(n_, cplx(0.0)) { check_grid_size(n_); }

    int xi_min() const { return -n / 2; }
    int xi_max() const { return n / 2 - 1; }
    cplx& at(int xi) { return c[xi + n / 2]; }
    const cplx& at(int xi) const { return c[xi + n / 2]; }
};

// Integer cutoff values N(x_k), each in [-N/2, N/2] (upper end inclusive).
struct cutoff_function {
    int n = 0;
    std::vector<int> v;

    cutoff_function() = default;
    explicit cutoff_function(int n_, int fill = 0) : n(n_), v(n_, fill) { check_grid_size(n_); }

    int& operator[](int k) { return v[k]; }
    const int& operator[](int k) const { return v[k]; }
    void validate() const;
};

// coefficients(xi) = (1/N) sum_k f(x_k) e^{-2 pi i x_k xi}
spectrum forward_transform(const grid_function& f);
// f(x_k) = sum_xi c(xi) e^{2 pi i x_k xi}
grid_function inverse_transform(const spectrum& s);

// (1/N) sum_k f(x_k) conj(g(x_k)); linear in f, conjugate-linear in g.
cplx inner_product(const grid_function& f, const grid_function& g);

double norm_l2(const grid_function& f);   // sqrt((1/N) sum |f|^2)
double norm_l1(const grid_function& f);   // (1/N) sum |f|
double norm_linf(const grid_function& f);
double norm_l2(const spectrum& s);        // sqrt(sum |c|^2)

// e^{2 pi i xi x_k}
grid_function mode(int n, int xi);

// Hardy-Littlewood maximal function over the standard dyadic grid on the
// torus: intervals [m 2^-l, (m+1) 2^-l) for l = 0..log2(N); output at x_k is
// the largest average of |f| over a dyadic interval containing x_k.
grid_function dyadic_maximal(const grid_function& f);

}  // namespace tfa
