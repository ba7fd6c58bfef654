#pragma once

#include <vector>

#include "tfa/grid.hpp"
#include "tfa/rational.hpp"
#include "tfa/tiles.hpp"

namespace tfa {

// Wave packets are built on the frequency side: a compactly supported bump is
// sampled at the integer frequencies strictly inside (9/10) omega_P, phased to
// center the packet at the middle of I_P, then L2-normalized on the grid.
// Four bump variants with decreasing transition sharpness are available so
// tests never depend on one packet family; family 0 is the default.
inline constexpr int packet_family_count = 4;

struct wave_packet {
    tile on;
    int family = 0;
    grid_function values;
    spectrum coeffs;
};

// Smallest admissible frequency width: below 8 grid frequencies the sampled
// bump cannot hold the support invariant.
inline constexpr int min_packet_width = 8;

wave_packet make_wave_packet(int n, const tile& p, int family = 0);

// Measured decay constant: sup over the grid of |phi(x)| |I|^{1/2} chi^{-M},
// where chi(x) = (1 + (d(x,x_I)/|I|)^2)^{-1/2} with torus distance d.
double verify_decay(const wave_packet& packet, int order);

double spectrum_mass_outside(const wave_packet& packet);  // relative L2 mass

struct coefficient_sequence {
    std::vector<cplx> values;  // parallel to the tile collection
    int component = 0;         // which P_j the packets sit on
    char kind = 'a';           // 'a' plain, 'b' modulated
};

// a_P = <f, phi_{P_j}> over a tri-tile collection, j in {1,2,3}.
coefficient_sequence coefficients(const grid_function& f, const std::vector<tri_tile>& tiles,
                                  int j, int family = 0);

// b_{P_2} = <G chi_{{x : cutoff(x) in omega_{P_2}}}, phi_{P_1}> over bi-tiles.
coefficient_sequence modulated_coefficients(const grid_function& g, const cutoff_function& cut,
                                            const std::vector<bi_tile>& tiles, int family = 0);

// ---- Walsh model ----

// Walsh packets localize perfectly on both sides: supported exactly on I_P,
// Walsh spectrum exactly omega_P, values in {+-|I|^{-1/2}, 0}. Only unshifted
// dyadic area-1 tiles with nonnegative frequencies are representable.
grid_function walsh_packet(int n, const tile& p);

// Sum over the grid of the sign patterns' product; the inner product equals
// count * |I_a|^{-1/2} |I_b|^{-1/2} / n, so orthogonality is an integer test.
i64 walsh_signed_count(int n, const tile& a, const tile& b);

// Paley-ordered Walsh coefficients c[h] = (1/n) sum_k f(x_k) wal_h(x_k).
std::vector<cplx> walsh_transform(const grid_function& f);

// Exact check, integer arithmetic throughout: the Walsh transform of the
// packet on p vanishes exactly at every h outside omega_p.
bool walsh_spectrum_matches(int n, const tile& p);

}  // namespace tfa
