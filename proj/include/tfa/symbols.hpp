#pragma once

#include <array>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "tfa/grid.hpp"
#include "tfa/tiles.hpp"

namespace tfa {

enum class singular_kind { none, diagonal_line, cutoff_line, cutoff_vertex, cone_boundary };

// Sampled bilinear multiplier over integer frequency pairs (xi1, xi2),
// both running over [-n/2, n/2).
struct symbol2d {
    int n = 0;
    std::vector<cplx> values;
    singular_kind singular = singular_kind::none;
    std::optional<int> cutoff;

    symbol2d() = default;
    explicit symbol2d(int n_, singular_kind s = singular_kind::none)
        : n(n_), values(size_t(n_) * size_t(n_), cplx(0.0)), singular(s) {
        check_grid_size(n_);
    }

    cplx& at(int xi1, int xi2) { return values[index(xi1, xi2)]; }
    const cplx& at(int xi1, int xi2) const { return values[index(xi1, xi2)]; }
    size_t index(int xi1, int xi2) const;
    double sup_abs() const;
    void validate(double tol = 1e-2) const;  // enforces sup |m| <= 1 + tol
};

// Sharp indicator of {xi1 < xi2 < cutoff}.
symbol2d cone_indicator(int n, int cutoff);

// Quadrature for the translation and dilation averages. Translations are
// averaged over one grid period per scale (integer periods repeat exactly)
// and the dilation exponent over k_phases midpoints per octave; the nominal
// [k_lo, k_hi] range collapses onto one octave with equal weights.
struct quad_params {
    int eta_steps = 1024;
    int k_phases = 32;
    int k_lo = -8;
    int k_hi = 8;

    quad_params refined() const { return {eta_steps * 2, k_phases * 2, k_lo, k_hi}; }
};

// Scale-average normalization constant: the averaged cutoff equals this
// times the half-line indicator in the quadrature limit.
double cutoff_normalization();

// One (phase, scale) slot of the average: omega length and its weight.
struct scale_term {
    double scale = 0.0;
    double weight = 0.0;
};

std::vector<scale_term> cutoff_scale_terms(double anchor, double target, const quad_params& q = {});

// Normalized finite average approximating [target < anchor].
double averaged_cutoff_value(double anchor, double target, const quad_params& q = {});

// The same, tabulated over the frequency grid of size n.
std::vector<double> averaged_cutoff(int n, int cutoff, const quad_params& q = {});

// ---- Whitney decomposition of the cone {xi1 < xi2} on the zero-sum plane ----

struct whitney_config {
    double c1 = 4.0;    // lower Whitney constant
    double c2 = 64.0;   // upper Whitney constant
    double core = 0.5;  // bump is 1 within this fraction of the half-side
    double edge = 0.8;  // bump support ends at this fraction ( (8/10)Q )
};

struct whitney_cube {
    shifted_cube cube;    // dim 3
    int sigma_index = 0;  // base-3 encoding of the shift triple, first coordinate high
    double dist = 0.0;    // distance to the line {x1 = x2, x1 + x2 + x3 = 0}
    int cone_side = 0;    // +1 when the plane slice lies in {x1 < x2}, -1 otherwise
};

struct whitney_decomposition {
    whitney_config config;
    int n = 0;
    std::vector<whitney_cube> cubes;        // cubes seen by the plane lattice
    std::vector<std::vector<int>> classes;  // sparse rank-1 classes when requested
};

// Collects every Whitney cube whose bump is positive at some lattice point
// (xi1, xi2, -xi1-xi2) of the grid; errors out if the constants leave a
// lattice point off the diagonal uncovered. with_classes additionally splits
// the cubes, per shift, into sparse collections of rank 1.
whitney_decomposition whitney_decompose(int n, const whitney_config& cfg = {},
                                        bool with_classes = false);

// Point evaluation of the Whitney family: bump values and the partition
// denominator. Keep decisions are memoized across calls.
class whitney_eval {
  public:
    explicit whitney_eval(const whitney_config& cfg) : cfg_(cfg) {}

    struct hit {
        shifted_cube cube;
        int sigma_index = 0;
        double bump = 0.0;
    };

    // All kept cubes with positive bump at x; empty on the singular line.
    std::vector<hit> cover(const std::array<double, 3>& x);
    // psi_Q = b_Q / S at x; zero wherever b_Q vanishes.
    double partition_value(const shifted_cube& q, const std::array<double, 3>& x);

    const whitney_config& config() const { return cfg_; }

  private:
    bool kept(int scale, int sigma_index, const std::array<i64, 3>& pos);

    whitney_config cfg_;
    std::map<std::array<i64, 5>, bool> cache_;
};

double cube_bump(const shifted_cube& q, const whitney_config& cfg, const std::array<double, 3>& x);
double line_distance(const std::array<double, 3>& lo, const std::array<double, 3>& hi);

// ---- the three symbols ----

symbol2d build_m_prime(int n, int cutoff, const quad_params& q = {},
                       const whitney_config& w = {});
symbol2d build_m_doubleprime(int n, int cutoff, const quad_params& q = {});
// chi_{xi1<xi2<cutoff} minus the two pieces, exact at every grid point.
symbol2d m_tripleprime_from(const symbol2d& mp, const symbol2d& mpp);
symbol2d build_m_tripleprime(int n, int cutoff, const quad_params& q = {},
                             const whitney_config& w = {});

// ---- Fourier factorization of a partition piece ----

struct bump_factorization {
    int lmax = 4;
    int samples = 32;
    double period = 0.0;            // per-coordinate period of the series
    std::vector<cplx> coeffs;       // (2 lmax + 1)^3 block, l1 fastest
    double tail = 0.0;              // sum |c_l| over sampled modes with |l|_inf > lmax
    double recon_error = 0.0;       // sup |truncated series - psi| over the sample box

    cplx coeff(int l1, int l2, int l3) const;
};

bump_factorization factor_bumps(const whitney_cube& q, const whitney_config& cfg, int lmax = 4,
                                int samples = 32);

// ---- finite-difference multiplier bounds ----

struct mmh_entry {
    int a1 = 0, a2 = 0;      // central-difference multi-index
    double constant = 0.0;   // sup |xi - center|^{a1+a2} |D^a m(xi)|
};

struct mmh_report {
    int max_order = 0;
    std::vector<mmh_entry> entries;
    std::array<double, 4> order_max{};
};

mmh_report check_mmh(const symbol2d& m, std::array<int, 2> center, int max_order);

// CSV rows "xi1,xi2,re,im", xi1-major.
void write_symbol_csv(const symbol2d& m, std::ostream& out);

}  // namespace tfa
