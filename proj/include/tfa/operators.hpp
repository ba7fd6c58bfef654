#pragma once

#include "tfa/grid.hpp"
#include "tfa/symbols.hpp"

namespace tfa {

// Partial Fourier sums below a per-point cutoff: sum_{xi < N(x_k)} c(xi) e^{2 pi i x_k xi}.
grid_function carleson_apply(const spectrum& f, const cutoff_function& cutoff);
// Pointwise largest modulus over every integer cutoff in [-N/2, N/2].
grid_function carleson_maximal(const spectrum& f);

// sum_{xi1 < xi2} c1(xi1) c2(xi2) e^{2 pi i x_k (xi1 + xi2)}
grid_function bht_apply(const spectrum& f1, const spectrum& f2);

// sum_{xi1 < xi2 < N(x_k)}; maximal variant takes the sup of moduli over cutoffs.
grid_function bicarleson_apply(const spectrum& f1, const spectrum& f2,
                               const cutoff_function& cutoff);
grid_function bicarleson_maximal(const spectrum& f1, const spectrum& f2);

// Direct double sum per output point; the reference path everything else is
// measured against.
grid_function multiplier_apply(const symbol2d& m, const spectrum& f1, const spectrum& f2);

// Pointwise sup of |T_{tau m}| over all n^2 grid translations of the symbol;
// translations wrap on the frequency torus.
grid_function maximal_modulated_apply(const symbol2d& m, const spectrum& f1, const spectrum& f2);

// Same values as multiplier_apply, evaluated by folding the antidiagonals of
// the weighted symbol and inverting one transform.
grid_function fft_fast_path(const symbol2d& m, const spectrum& f1, const spectrum& f2);
// Per-point cutoff variant: applies m restricted to {xi1 < xi2 < N(x_k)},
// one transform per distinct cutoff value.
grid_function fft_fast_path(const symbol2d& m, const spectrum& f1, const spectrum& f2,
                            const cutoff_function& cutoffs);

}  // namespace tfa
