#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tfa/common.hpp"
#include "tfa/rational.hpp"

namespace tfa {

// Shift components live in {0, 1/3, 2/3}; stored as the numerator in thirds.
using shift3 = std::array<int, 3>;

rat shift_value(int thirds);  // 0 -> 0, 1 -> 1/3, 2 -> 2/3

// Cube of the shifted n-dyadic mesh: 2^j (k + (0,1)^n + (-1)^j sigma).
struct shifted_cube {
    int dim = 1;
    int scale = 0;                 // side length 2^scale
    std::array<i64, 3> pos{};      // k, only the first dim entries used
    shift3 shift{};                // per-coordinate numerator of thirds

    interval edge(int i) const;    // half-open extent along coordinate i
    rat side() const { return rat_pow2(scale); }
    bool operator==(const shifted_cube& o) const;
    std::string str() const;
};

bool cube_contains(const shifted_cube& q, const std::vector<rat>& point);
bool cube_contains(const shifted_cube& outer, const shifted_cube& inner);

// Plain time-frequency rectangle; the common currency of the order relations.
struct tile {
    interval time;
    interval freq;
    bool operator==(const tile& o) const { return time == o.time && freq == o.freq; }
};

// Tri-tile: one spatial interval from the unshifted dyadic grid, three
// frequency intervals forming a shifted cube of side 1/|I|.
struct tri_tile {
    interval time;
    shifted_cube freq;  // dim 3, scale = -log2|I|

    tile component(int i) const { return tile{time, freq.edge(i)}; }
    bool operator==(const tri_tile& o) const { return time == o.time && freq == o.freq; }
    std::string str() const;
};

// Builds the tri-tile over frequency cube q whose spatial interval is the
// k-th dyadic interval of length 1/side(q).
tri_tile make_tri_tile(const shifted_cube& q, i64 time_pos);

// Bi-tile on the grid pair (stretch, offset): frequency intervals are
// stretch*I + offset for dyadic I, spatial intervals are (1/stretch)*I,
// and the area |I_P|*|omega_P| is exactly 2.
struct bi_tile {
    rat stretch{1, 1};  // dilation factor of the frequency grid, in [1/2, 2]
    rat offset{0, 1};
    interval time;
    interval freq;

    tile half(int j) const;  // j = 1 -> left frequency half, j = 2 -> right
    bool same_grid(const bi_tile& o) const { return stretch == o.stretch && offset == o.offset; }
    bool operator==(const bi_tile& o) const;
    std::string str() const;
};

// freq_scale: |omega| = stretch * 2^freq_scale. The spatial interval is the
// time_pos-th interval of the matching dual length.
bi_tile make_bi_tile(const rat& stretch, const rat& offset, int freq_scale, i64 freq_pos,
                     i64 time_pos);

// ---- meshes ----

struct mesh_request {
    int dim = 1;
    shift3 shift{};
    int scale_min = 0;
    int scale_max = 0;
    std::vector<interval> extent;  // dim entries
};

std::vector<shifted_cube> mesh_generate(const mesh_request& req);

// ---- sparseness ----

struct pair_witness {
    bool ok = true;
    int a = -1, b = -1;
    std::string note;
};

// Same-shift collection; dilation factor configurable (8 at desk scale).
pair_witness is_sparse(const std::vector<shifted_cube>& cubes, const rat& factor);

struct sparsify_result {
    std::vector<std::vector<int>> parts;  // indices into the input
    int class_bound = 0;                  // scale classes x position classes
};

sparsify_result sparsify(const std::vector<shifted_cube>& cubes, const rat& factor);

// ---- rank 1 ----

enum class rank1_third_bullet {
    scale_comparison,   // |Q'| < factor * |Q|
    measure_comparison  // |Q'| < |factor Q| = factor^n |Q|
};

struct rank1_config {
    rat inner_dilation{3, 1};   // the 3 in 3Q'_j subset 3Q_j
    rat outer_dilation{8, 1};   // paper 10^7
    rat size_dilation{8, 1};    // paper 10^9
    rank1_third_bullet third = rank1_third_bullet::scale_comparison;
};

pair_witness check_rank1(const std::vector<shifted_cube>& cubes, const rank1_config& cfg);
pair_witness check_rank1(const std::vector<tri_tile>& tiles, const rank1_config& cfg);

// ---- order relations ----

enum class tile_order {
    lt_r,      // a <r b:  I_a strictly inside I_b, 3 omega_b inside 3 omega_a
    le_r,      // a <r b or a = b
    lesssim_r, // I_a inside I_b, K omega_b inside K omega_a
    lesssim_prime_r,
    le_c       // a <=c b: I_a inside I_b, omega_b inside omega_a
};

// Evaluates "a below b" in the named order; K is the lesssim dilation.
bool order_relate(const tile& a, const tile& b, tile_order mode, const rat& lesssim_dilation);
bool order_relate(const tile& a, const tile& b, tile_order mode);  // K = 8

// ---- trees ----

struct tri_tree {
    tri_tile top;
    std::vector<int> members;  // indices into the owning collection
    int j = 1;                 // tree type
};

struct bi_tree {
    bi_tile top;
    std::vector<int> members;
    int j = 0;  // 0 = plain tree, 1 or 2 = j-tree
};

// Members = {P in collection : P_j <=r top_j}.
tri_tree tree_members(const std::vector<tri_tile>& collection, const tri_tile& top, int j);
// Members = {P : P <=c top}, restricted further by the j-tree condition
// omega_{top_j} subset omega_{P_j} when j is 1 or 2.
bi_tree tree_members(const std::vector<bi_tile>& collection, const bi_tile& top, int j);

// Strong i-disjointness of two tri-tile trees drawn from one collection.
pair_witness strongly_disjoint(const std::vector<tri_tile>& collection, const tri_tree& t,
                               const tri_tree& u, int i);

// ---- fixtures ----

std::string serialize(const std::vector<tri_tile>& tiles);
std::vector<tri_tile> parse_tri_tiles(const std::string& text);

std::string serialize(const std::vector<bi_tile>& tiles);
std::vector<bi_tile> parse_bi_tiles(const std::string& text);

}  // namespace tfa
