#pragma once

#include <vector>

#include "tfa/grid.hpp"
#include "tfa/tiles.hpp"

namespace tfa {

// Which packet family stands in for each bump variant appearing in a form.
// The forms are meaningful for any choice, so tests vary these freely
// instead of fixing one calibration.
struct family_choice {
    int outer = 0;      // coefficient packets on the left bi-tile interval
    int outer_alt = 1;  // the masked left-interval factor paired against f3
    int inner = 2;      // coefficient packets on the inner collection
    int inner_alt = 3;  // function factor of the inner Carleson sum
};

// Frequency reflection omega -> -omega over the same spatial interval.
// Conjugating a packet equals building one on the reflected tile, which is
// how conjugation signs on third components are absorbed into the geometry.
tile reflect_freq(const tile& t);

// Inner bilinear sum attached to a left bi-tile interval p1: tri-tiles whose
// third frequency interval sits inside freq(p1) contribute
// |I|^{-1/2} <f1, phi_{Q_1}> <f2, phi_{Q_2}> phi_{Q_3}.
grid_function b_inner(const tile& p1, const std::vector<tri_tile>& qs, const grid_function& f1,
                      const grid_function& f2, int family = 2);

// Trilinear form coupling a bi-tile collection with a rank-1 tri-tile
// collection: sum over P of <B_{P_1}(f1,f2), phi_{P_1}> <phi'_{P_1} chi, f3>
// where chi masks the points whose cutoff value lies in the right interval.
// Linear in f1 and f2, conjugate-linear in f3.
cplx lambda_prime(const std::vector<bi_tile>& ps, const std::vector<tri_tile>& qs,
                  const grid_function& f1, const grid_function& f2, const grid_function& f3,
                  const cutoff_function& cut, const family_choice& fam = {});

// Same sum grouped by tri-tile instead of bi-tile; agrees with lambda_prime
// up to floating-point reassociation.
cplx lambda_prime_reversed(const std::vector<tri_tile>& qs, const std::vector<bi_tile>& ps,
                           const grid_function& f1, const grid_function& f2,
                           const grid_function& f3, const cutoff_function& cut,
                           const family_choice& fam = {});

// Adjoint Carleson operator: sum over P of <f chi_{P_2}, phi_{P_1}> phi_{P_1}
// with the same cutoff masking as above.
grid_function carleson_adjoint(const std::vector<bi_tile>& ps, const grid_function& f,
                               const cutoff_function& cut, int family = 0);

// Per tri-tile pairing against the adjoint sum: entry Q collects, over the
// bi-tiles whose left frequency interval contains freq(Q_3),
// <phi_{Q_3}, phi_{P_1}> <phi'_{P_1} chi, f3>. These are the coefficients the
// reversed grouping of lambda_prime attaches to the third slot.
std::vector<cplx> adjoint_coefficients(const std::vector<tri_tile>& qs,
                                       const std::vector<bi_tile>& ps, const grid_function& f3,
                                       const cutoff_function& cut, const family_choice& fam = {});

struct decouple_result {
    bool ok = true;
    int offender = -1;             // tree index with the largest violation
    double residue = 0.0;          // largest |full - restricted| pairing
    std::vector<double> residues;  // one entry per tree member
};

// For each tree member Q, pairs phi_{Q_3} against the adjoint Carleson sum
// over the bi-tiles linked to Q alone and over those linked to any member,
// and checks the two pairings agree: the extra terms must die because their
// packet spectra cannot meet. Sparseness of the tree is what rules the
// overlaps out, so it is enforced up front unless explicitly waived to
// demonstrate the failure mode.
decouple_result decouple_check(const std::vector<tri_tile>& tree, const std::vector<bi_tile>& ps,
                               const grid_function& f, const cutoff_function& cut,
                               double tol = 1e-8, const family_choice& fam = {},
                               bool enforce_sparse = true);

// Trilinear form coupling two bi-tile collections: inside each P the finer
// tiles of qs whose right interval meets the right interval of P contribute
// a masked Carleson sum in f2, and the result is paired against f3 together
// with the masked left-interval factor of P. Linear in f1 and f2,
// conjugate-linear in f3.
cplx lambda_doubleprime(const std::vector<bi_tile>& ps, const std::vector<bi_tile>& qs,
                        const grid_function& f1, const grid_function& f2, const grid_function& f3,
                        const cutoff_function& cut, const family_choice& fam = {});

// Same sum grouped by the finer collection; agrees with lambda_doubleprime
// up to floating-point reassociation.
cplx lambda_doubleprime_rewritten(const std::vector<bi_tile>& qs, const std::vector<bi_tile>& ps,
                                  const grid_function& f1, const grid_function& f2,
                                  const grid_function& f3, const cutoff_function& cut,
                                  const family_choice& fam = {});

// Bilinear Carleson model form: sum over P of <f1, phi_{P_1}> <f2 chi, phi_{P_1}>.
cplx lambda_carleson(const std::vector<bi_tile>& ps, const grid_function& f1,
                     const grid_function& f2, const cutoff_function& cut, int family = 0);

}  // namespace tfa
