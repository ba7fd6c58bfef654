#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tfa/forms.hpp"
#include "tfa/grid.hpp"
#include "tfa/tiles.hpp"

namespace tfa {

// (1 + (d / |I|)^2)^{-1/2} where d is the torus distance from x to the
// center of I. Callers raise the value to whatever power they need.
double chi_tilde(double x, const interval& I);

// Search-space knobs shared by the functionals below. The suprema in the
// definitions range over an unbounded ambient grid; the depths say how many
// scales above the given collection the candidate tops and ancestors reach.
// Depth-sensitivity is measured by tests rather than assumed converged.
struct size_energy_config {
    int top_depth = 3;      // extra coarser scales admitted for tree tops
    int ambient_depth = 3;  // bi-tile ancestor scales in the size/energy sups
    int chi_power = 4;      // exponent on the chi_tilde weights
};

// One functional evaluation. The witness fields name the extremizer so a
// test can re-evaluate it independently; which fields are set depends on
// the functional:
//   size variants          trees[0] holds the best tree
//   energy                 chosen = the disjoint index set
//   modified energy        n_exponent + trees = the selected collection
//   bi-tile size           chosen[0] = tile index, ancestors[0] = the sup ancestor
//   bi-tile energy         chosen pairs with ancestors entrywise
struct size_energy_report {
    std::string functional;
    double value = 0.0;
    std::string method = "exact";  // or "greedy-lower-bound"
    int n_exponent = 0;
    std::vector<int> chosen;
    std::vector<tri_tree> trees;
    std::vector<bi_tile> ancestors;
    std::string to_json() const;
};

// sup over i-trees, i != j, of (|I_T|^{-1} sum over members |a_{P_j}|^2)^{1/2}
// with tops drawn from the collection and its grid ancestors up to
// cfg.top_depth. Exact over that top-set. Empty collection gives 0.
size_energy_report size_j(const std::vector<tri_tile>& tiles, const std::vector<cplx>& coeffs,
                          int j, const size_energy_config& cfg = {});

// sup over subsets with pairwise disjoint j-components of the l2 norm of the
// chosen coefficients. Disjointness coincides with incomparability in the
// containment order for area-1 tiles of one grid, so this is a max-weight
// antichain, solved exactly by a minimum-flow cut. Mixed shifts are refused.
size_energy_report energy_j(const std::vector<tri_tile>& tiles, const std::vector<cplx>& coeffs,
                            int j, const size_energy_config& cfg = {});

// max over n and over collections of strongly j-disjoint trees satisfying
// the two-sided conditions
//   (sum over T |a_{P_j}|^2)^{1/2} >= 2^n |I_T|^{1/2}       per tree
//   (sum over T' |a_{P_j}|^2)^{1/2} <= 2^{n+1} |I_{T'}|^{1/2} per subtree
// of 2^n (sum |I_T|)^{1/2}. Trees are selected greedily (highest top
// frequency first, then leftmost, then smallest), so the result is a lower
// bound and is tagged greedy-lower-bound. Always at most energy_j; asserted
// whenever the collection lives on one grid.
size_energy_report modified_energy_j(const std::vector<tri_tile>& tiles,
                                     const std::vector<cplx>& coeffs, int j,
                                     const size_energy_config& cfg = {});

// sup over the same trees as size_j of
//   |I_T|^{-1/p} || (sum over T |a|^2 chi_{I_P} / |I_P|)^{1/2} ||_{L^p(I_T)}
// for finite p > 1. The integrand is piecewise constant on the tile
// endpoints, so the norm is computed exactly.
size_energy_report size_jn_variant(const std::vector<tri_tile>& tiles,
                                   const std::vector<cplx>& coeffs, int j, double p,
                                   const size_energy_config& cfg = {});

// Weak endpoint of the same family: |I_T|^{-1} times the L^{1,infty}
// quasinorm over I_T of the square function above.
size_energy_report size_jn_weak(const std::vector<tri_tile>& tiles,
                                const std::vector<cplx>& coeffs, int j,
                                const size_energy_config& cfg = {});

enum class bsize_mode { full, easy };
enum class benergy_mode { plain, modified };

// full: sup over P in the collection and grid ancestors P' up to
// cfg.ambient_depth of
//   |I_{P'}|^{-1} integral |G| chi_{{cutoff in omega_{P'}}} chi_tilde^C_{I_{P'}}
// easy: the ancestors are skipped, so only P itself is tested.
size_energy_report bitile_size(const std::vector<bi_tile>& tiles, const grid_function& g,
                               const cutoff_function& cut, bsize_mode mode,
                               const size_energy_config& cfg = {});

// plain: max over pairwise disjoint ancestor selections D of the sum of the
// integrals above (unnormalized). modified: max over n and D with each
// integral >= 2^n |I_{P'}| of 2^n sum |I_{P'}|. Both exact via the same
// antichain reduction, over ancestors up to cfg.ambient_depth.
size_energy_report bitile_energy(const std::vector<bi_tile>& tiles, const grid_function& g,
                                 const cutoff_function& cut, benergy_mode mode,
                                 const size_energy_config& cfg = {});

enum class estimate_kind {
    energy_lemma,    // modified energy of <f, phi_{P_j}>  vs  ||f||_2
    size_lemma,      // size of the same                   vs  sup_P avg_E chi_tilde^M
    benergy,         // modified bi-tile energy            vs  ||f||_1
    bsize,           // full bi-tile size                  vs  sup_{P'} avg_E chi_tilde^M
    carleson_energy, // modified energy of adjoint coeffs  vs  |E|^{1/2}
    carleson_size,   // size of adjoint coeffs             vs  sup_Q (avg_E chi_tilde)^{1/(1+eps)}
    restriction      // local adjoint L^{1+eps} mass       vs  (weighted |E|)^{1/(1+eps)}
};

// Everything an estimate might need; each kind reads the fields it uses and
// rejects a fixture that lacks them.
struct estimate_fixture {
    std::vector<tri_tile> tris;
    std::vector<bi_tile> bis;
    grid_function f;                     // the tested function
    std::vector<std::uint8_t> set_e;     // indicator of E on the grid
    std::optional<cutoff_function> cut;  // bi-tile and Carleson kinds
    int j = 1;                           // tri-tile component index
    int family = 0;                      // packet family for coefficients
    family_choice families{};            // Carleson kinds
    double eps = 0.5;                    // the 1+eps exponents
    int decay_order = 4;                 // M in the chi_tilde^M majorants
    std::optional<tri_tile> tree_top;    // restriction: the tree top
    int tree_i = 1;                      // restriction: tree type, != 3
};

struct estimate_report {
    std::string kind;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    double budget = 0.0;  // <= 0 means report-only
    bool within_budget = true;
    std::string to_json() const;
};

// Evaluates both sides of the named inequality on the fixture and reports
// lhs / rhs. A positive budget is enforced; budget <= 0 only records the
// ratio, which is how the budgets get calibrated in the first place. A zero
// rhs with a nonzero lhs is flagged as out of budget unconditionally.
estimate_report estimate_bounds_check(estimate_kind kind, const estimate_fixture& fx,
                                      double budget, const size_energy_config& cfg = {});

}  // namespace tfa
