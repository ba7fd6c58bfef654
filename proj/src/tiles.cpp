#include "tfa/tiles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace tfa {

rat shift_value(int thirds) {
    require(thirds >= 0 && thirds <= 2, "shift component must be 0, 1 or 2 thirds");
    return rat(thirds, 3);
}

interval shifted_cube::edge(int i) const {
    require(i >= 0 && i < dim, "cube edge index out of range");
    rat side = rat_pow2(scale);
    // (-1)^j: even scales add the shift, odd scales subtract it
    int sign = (((scale % 2) + 2) % 2 == 1) ? -1 : 1;
    rat s = shift_value(shift[i]) * rat(sign);
    rat lo = side * (rat(pos[i]) + s);
    return interval(lo, lo + side);
}

bool shifted_cube::operator==(const shifted_cube& o) const {
    if (dim != o.dim || scale != o.scale || shift != o.shift) return false;
    for (int i = 0; i < dim; ++i) {
        if (pos[i] != o.pos[i]) return false;
    }
    return true;
}

std::string shifted_cube::str() const {
    std::ostringstream out;
    out << "cube(j=" << scale << ", k=(";
    for (int i = 0; i < dim; ++i) out << (i ? "," : "") << pos[i];
    out << "), sigma=(";
    for (int i = 0; i < dim; ++i) out << (i ? "," : "") << shift[i] << "/3";
    out << "))";
    return out.str();
}

bool cube_contains(const shifted_cube& q, const std::vector<rat>& point) {
    require(int(point.size()) == q.dim, "point dimension mismatch");
    for (int i = 0; i < q.dim; ++i) {
        if (!q.edge(i).contains(point[i])) return false;
    }
    return true;
}

bool cube_contains(const shifted_cube& outer, const shifted_cube& inner) {
    require(outer.dim == inner.dim, "cube dimension mismatch");
    for (int i = 0; i < outer.dim; ++i) {
        if (!outer.edge(i).contains(inner.edge(i))) return false;
    }
    return true;
}

tri_tile make_tri_tile(const shifted_cube& q, i64 time_pos) {
    require(q.dim == 3, "tri-tile needs a 3-dimensional frequency cube");
    rat len = rat_pow2(-q.scale);  // |I| = 1/side so that |I|*|omega_i| = 1
    tri_tile t;
    t.time = interval(rat(time_pos) * len, rat(time_pos + 1) * len);
    t.freq = q;
    return t;
}

std::string tri_tile::str() const {
    return "tri(I=" + time.str() + ", Q=" + freq.str() + ")";
}

tile bi_tile::half(int j) const {
    require(j == 1 || j == 2, "bi-tile half index must be 1 or 2");
    return tile{time, j == 1 ? freq.left_half() : freq.right_half()};
}

bool bi_tile::operator==(const bi_tile& o) const {
    return stretch == o.stretch && offset == o.offset && time == o.time && freq == o.freq;
}

std::string bi_tile::str() const {
    return "bi(I=" + time.str() + ", w=" + freq.str() + ", stretch=" + stretch.str() +
           ", offset=" + offset.str() + ")";
}

bi_tile make_bi_tile(const rat& stretch, const rat& offset, int freq_scale, i64 freq_pos,
                     i64 time_pos) {
    require(rat(1, 2) <= stretch && stretch <= rat(2), "bi-tile stretch outside [1/2, 2]");
    bi_tile p;
    p.stretch = stretch;
    p.offset = offset;
    rat wlen = stretch * rat_pow2(freq_scale);
    p.freq = interval(stretch * rat(freq_pos) * rat_pow2(freq_scale) + offset,
                      stretch * rat(freq_pos + 1) * rat_pow2(freq_scale) + offset);
    // |I| = 2/|omega|; I comes from the reciprocal grid (1/stretch) * D
    rat ilen = rat(2) / wlen;
    p.time = interval(rat(time_pos) * ilen, rat(time_pos + 1) * ilen);
    return p;
}

std::vector<shifted_cube> mesh_generate(const mesh_request& req) {
    require(req.dim >= 1 && req.dim <= 3, "mesh dimension must be 1..3");
    require(int(req.extent.size()) == req.dim, "extent dimension mismatch");
    require(req.scale_min <= req.scale_max, "empty scale range");
    std::vector<shifted_cube> out;
    for (int j = req.scale_min; j <= req.scale_max; ++j) {
        rat side = rat_pow2(j);
        int sign = (((j % 2) + 2) % 2 == 1) ? -1 : 1;
        // Coordinate i admits k with 2^j(k+s) < hi and 2^j(k+1+s) > lo.
        std::array<i64, 3> klo{}, khi{};
        bool any = true;
        for (int i = 0; i < req.dim; ++i) {
            rat s = shift_value(req.shift[i]) * rat(sign);
            rat a = req.extent[i].lo / side - rat(1) - s;  // k > a
            rat b = req.extent[i].hi / side - s;           // k < b
            // smallest integer strictly above a, largest strictly below b
            i64 lo = i64(std::floor(a.to_double())) - 2;
            while (!(rat(lo) > a)) ++lo;
            i64 hi = i64(std::ceil(b.to_double())) + 2;
            while (!(rat(hi) < b)) --hi;
            if (lo > hi) { any = false; break; }
            klo[i] = lo;
            khi[i] = hi;
        }
        if (!any) continue;
        std::array<i64, 3> k = klo;
        while (true) {
            shifted_cube q;
            q.dim = req.dim;
            q.scale = j;
            q.pos = k;
            q.shift = req.shift;
            out.push_back(q);
            int i = 0;
            for (; i < req.dim; ++i) {
                if (k[i] < khi[i]) { ++k[i]; break; }
                k[i] = klo[i];
            }
            if (i == req.dim) break;
        }
    }
    return out;
}

namespace {

bool cubes_same_shift(const std::vector<shifted_cube>& cubes) {
    for (size_t i = 1; i < cubes.size(); ++i) {
        if (cubes[i].shift != cubes[0].shift || cubes[i].dim != cubes[0].dim) return false;
    }
    return true;
}

bool dilated_disjoint(const shifted_cube& a, const shifted_cube& b, const rat& factor) {
    for (int i = 0; i < a.dim; ++i) {
        if (!a.edge(i).dilate(factor).intersects(b.edge(i).dilate(factor))) return true;
    }
    return false;
}

}  // namespace

pair_witness is_sparse(const std::vector<shifted_cube>& cubes, const rat& factor) {
    require(cubes_same_shift(cubes), "is_sparse: cubes must share one shift");
    pair_witness w;
    for (size_t a = 0; a < cubes.size(); ++a) {
        for (size_t b = 0; b < cubes.size(); ++b) {
            if (a == b) continue;
            const auto &qa = cubes[a], &qb = cubes[b];
            if (qa.scale < qb.scale) {
                // |Q| < |Q'| must imply |factor*Q| < |Q'|, i.e. factor*side < side'
                if (!(factor * qa.side() < qb.side())) {
                    return pair_witness{false, int(a), int(b), "scale gap too small"};
                }
            } else if (qa.scale == qb.scale && !(qa == qb)) {
                if (!dilated_disjoint(qa, qb, factor)) {
                    return pair_witness{false, int(a), int(b), "dilated cubes overlap"};
                }
            }
        }
    }
    return w;
}

sparsify_result sparsify(const std::vector<shifted_cube>& cubes, const rat& factor) {
    require(cubes_same_shift(cubes), "sparsify: cubes must share one shift");
    sparsify_result res;
    if (cubes.empty()) return res;
    // Scale classes mod s with 2^s > factor separate the sizes; position
    // classes mod b per coordinate with b > factor separate equal sizes.
    int s = 1;
    while (!(rat_pow2(s) > factor)) ++s;
    i64 b = 1;
    while (!(rat(b) > factor)) ++b;
    res.class_bound = s;
    for (int i = 0; i < cubes[0].dim; ++i) res.class_bound *= int(b);
    std::map<std::array<i64, 4>, std::vector<int>> buckets;
    for (size_t idx = 0; idx < cubes.size(); ++idx) {
        const auto& q = cubes[idx];
        std::array<i64, 4> key{};
        key[0] = ((q.scale % s) + s) % s;
        for (int i = 0; i < q.dim; ++i) key[1 + i] = ((q.pos[i] % b) + b) % b;
        buckets[key].push_back(int(idx));
    }
    // The congruence classes are sparse by construction but often overshoot
    // the part count, so coalesce greedily while unions stay sparse.
    auto union_sparse = [&](const std::vector<int>& xs, const std::vector<int>& ys) {
        std::vector<shifted_cube> merged;
        for (int i : xs) merged.push_back(cubes[i]);
        for (int i : ys) merged.push_back(cubes[i]);
        return is_sparse(merged, factor).ok;
    };
    for (auto& [key, part] : buckets) {
        bool merged = false;
        for (auto& existing : res.parts) {
            if (union_sparse(existing, part)) {
                existing.insert(existing.end(), part.begin(), part.end());
                merged = true;
                break;
            }
        }
        if (!merged) res.parts.push_back(std::move(part));
    }
    for (auto& part : res.parts) std::sort(part.begin(), part.end());
    return res;
}

namespace {

// Shared rank-1 walk over pairs; cube and tri-tile versions differ only in
// how "component i of a nested/dilated" is phrased, so both lower to tiles.
pair_witness rank1_over_components(
    int count, int dim, const std::function<tile(int, int)>& comp,
    const std::function<bool(int, int)>& size_hypothesis, const rank1_config& cfg) {
    for (int a = 0; a < count; ++a) {
        for (int b = 0; b < count; ++b) {
            if (a == b) continue;
            // bullet 1: distinct objects have all components distinct
            bool all_equal = true;
            for (int i = 0; i < dim; ++i) {
                if (!(comp(a, i) == comp(b, i))) all_equal = false;
            }
            if (all_equal) continue;  // same geometry counts as the same object
            for (int i = 0; i < dim; ++i) {
                if (comp(a, i) == comp(b, i)) {
                    return pair_witness{false, a, b, "distinct objects share a component"};
                }
            }
            for (int j = 0; j < dim; ++j) {
                if (!order_relate(comp(b, j), comp(a, j), tile_order::le_r, cfg.outer_dilation)) {
                    continue;
                }
                // bullet 2: b_j <=r a_j forces b_i lesssim a_i for every i
                for (int i = 0; i < dim; ++i) {
                    if (!order_relate(comp(b, i), comp(a, i), tile_order::lesssim_r,
                                      cfg.outer_dilation)) {
                        return pair_witness{false, a, b, "nested component without lesssim"};
                    }
                }
                // bullet 3: under the size hypothesis, strict lesssim' off the pivot
                if (size_hypothesis(b, a)) {
                    for (int i = 0; i < dim; ++i) {
                        if (i == j) continue;
                        if (!order_relate(comp(b, i), comp(a, i), tile_order::lesssim_prime_r,
                                          cfg.outer_dilation)) {
                            return pair_witness{false, a, b, "size-bounded pair not separated"};
                        }
                    }
                }
            }
        }
    }
    return pair_witness{};
}

}  // namespace

pair_witness check_rank1(const std::vector<shifted_cube>& cubes, const rank1_config& cfg) {
    require(cubes_same_shift(cubes), "check_rank1: cubes must share one shift");
    auto comp = [&](int idx, int i) {
        // Frequency components only; rank 1 for cubes has no time coordinate,
        // so embed edges as tiles over a common dummy interval.
        return tile{interval(rat(0), rat(1)), cubes[idx].edge(i)};
    };
    auto size_hyp = [&](int bi, int ai) {
        if (cfg.third == rank1_third_bullet::scale_comparison) {
            return cubes[bi].side() < cfg.size_dilation * cubes[ai].side();
        }
        // measure reading: |Q'| < |factor Q| = factor^dim |Q|
        rat lhs(1), rhs(1);
        for (int i = 0; i < cubes[bi].dim; ++i) lhs = lhs * cubes[bi].side();
        for (int i = 0; i < cubes[ai].dim; ++i) rhs = rhs * (cfg.size_dilation * cubes[ai].side());
        return lhs < rhs;
    };
    int dim = cubes.empty() ? 0 : cubes[0].dim;
    return rank1_over_components(int(cubes.size()), dim, comp, size_hyp, cfg);
}

pair_witness check_rank1(const std::vector<tri_tile>& tiles, const rank1_config& cfg) {
    for (size_t i = 1; i < tiles.size(); ++i) {
        require(tiles[i].freq.shift == tiles[0].freq.shift,
                "check_rank1: tri-tiles must share one shift");
    }
    auto comp = [&](int idx, int i) { return tiles[idx].component(i); };
    auto size_hyp = [&](int bi, int ai) {
        if (cfg.third == rank1_third_bullet::scale_comparison) {
            return tiles[bi].time.length() < cfg.size_dilation * tiles[ai].time.length();
        }
        rat lhs(1), rhs(1);
        for (int i = 0; i < 3; ++i) lhs = lhs * tiles[bi].freq.side();
        for (int i = 0; i < 3; ++i) rhs = rhs * (cfg.size_dilation * tiles[ai].freq.side());
        return lhs < rhs;
    };
    return rank1_over_components(int(tiles.size()), 3, comp, size_hyp, cfg);
}

bool order_relate(const tile& a, const tile& b, tile_order mode, const rat& k) {
    switch (mode) {
        case tile_order::lt_r:
            return b.time.strictly_contains(a.time) &&
                   a.freq.dilate(rat(3)).contains(b.freq.dilate(rat(3)));
        case tile_order::le_r:
            return a == b || order_relate(a, b, tile_order::lt_r, k);
        case tile_order::lesssim_r:
            return b.time.contains(a.time) && a.freq.dilate(k).contains(b.freq.dilate(k));
        case tile_order::lesssim_prime_r:
            return order_relate(a, b, tile_order::lesssim_r, k) &&
                   !order_relate(a, b, tile_order::le_r, k);
        case tile_order::le_c:
            return b.time.contains(a.time) && a.freq.contains(b.freq);
    }
    fail("unknown tile order");
}

bool order_relate(const tile& a, const tile& b, tile_order mode) {
    return order_relate(a, b, mode, rat(8));
}

tri_tree tree_members(const std::vector<tri_tile>& collection, const tri_tile& top, int j) {
    require(j >= 1 && j <= 3, "tri-tile tree type must be 1..3");
    tri_tree t;
    t.top = top;
    t.j = j;
    for (size_t i = 0; i < collection.size(); ++i) {
        if (order_relate(collection[i].component(j - 1), top.component(j - 1), tile_order::le_r)) {
            t.members.push_back(int(i));
        }
    }
    return t;
}

bi_tree tree_members(const std::vector<bi_tile>& collection, const bi_tile& top, int j) {
    require(j >= 0 && j <= 2, "bi-tile tree type must be 0 (plain), 1 or 2");
    bi_tree t;
    t.top = top;
    t.j = j;
    for (size_t i = 0; i < collection.size(); ++i) {
        const bi_tile& p = collection[i];
        if (!top.time.contains(p.time) || !p.freq.contains(top.freq)) continue;
        if (j != 0 && !p.half(j).freq.contains(top.half(j).freq)) continue;
        t.members.push_back(int(i));
    }
    return t;
}

pair_witness strongly_disjoint(const std::vector<tri_tile>& collection, const tri_tree& t,
                               const tri_tree& u, int i) {
    require(i >= 1 && i <= 3, "disjointness index must be 1..3");
    for (int a : t.members) {
        for (int b : u.members) {
            tile pa = collection[a].component(i - 1);
            tile pb = collection[b].component(i - 1);
            if (pa == pb) return pair_witness{false, a, b, "shared i-component"};
            if (pa.freq.dilate(rat(2)).intersects(pb.freq.dilate(rat(2)))) {
                if (collection[b].time.intersects(t.top.time)) {
                    return pair_witness{false, a, b, "2-dilated overlap inside I_T"};
                }
                if (collection[a].time.intersects(u.top.time)) {
                    return pair_witness{false, a, b, "2-dilated overlap inside I_T'"};
                }
                // accepted pairs must be disjoint as rectangles I x 2omega
                bool rect_disjoint = !pa.time.intersects(pb.time) ||
                                     !pa.freq.dilate(rat(2)).intersects(pb.freq.dilate(rat(2)));
                require(rect_disjoint, "strong disjointness without rectangle disjointness");
            }
        }
    }
    return pair_witness{};
}

std::string serialize(const std::vector<tri_tile>& tiles) {
    std::ostringstream out;
    for (const auto& t : tiles) {
        // scale, spatial position, frequency positions, shift
        rat len = t.time.length();
        i64 tp = (t.time.lo / len).num;  // time.lo / len is integral by construction
        out << "tri " << t.freq.scale << " " << tp;
        for (int i = 0; i < 3; ++i) out << " " << t.freq.pos[i];
        for (int i = 0; i < 3; ++i) out << " " << t.freq.shift[i];
        out << "\n";
    }
    return out.str();
}

std::vector<tri_tile> parse_tri_tiles(const std::string& text) {
    std::vector<tri_tile> out;
    std::istringstream in(text);
    std::string kind;
    while (in >> kind) {
        require(kind == "tri", "unknown tile kind: " + kind);
        int scale;
        i64 tp;
        shifted_cube q;
        q.dim = 3;
        in >> scale >> tp;
        q.scale = scale;
        for (int i = 0; i < 3; ++i) in >> q.pos[i];
        for (int i = 0; i < 3; ++i) in >> q.shift[i];
        require(bool(in), "truncated tile record");
        out.push_back(make_tri_tile(q, tp));
    }
    return out;
}

namespace {

// Exponent e with r = 2^e; rejects anything that is not a power of two.
int exact_log2(const rat& r) {
    auto pow2 = [](i64 v) { return v > 0 && (v & (v - 1)) == 0; };
    if (r.den == 1) {
        require(pow2(r.num), "bi-tile width is not stretch * 2^k");
        int e = 0;
        while ((i64(1) << e) < r.num) ++e;
        return e;
    }
    require(r.num == 1 && pow2(r.den), "bi-tile width is not stretch * 2^k");
    int e = 0;
    while ((i64(1) << e) < r.den) ++e;
    return -e;
}

}  // namespace

std::string serialize(const std::vector<bi_tile>& tiles) {
    std::ostringstream out;
    for (const auto& p : tiles) {
        // grid parameters, then the frequency scale/position and time position
        rat wlen = p.freq.length();
        int fs = exact_log2(wlen / p.stretch);
        rat fp = (p.freq.lo - p.offset) / wlen;
        rat tp = p.time.lo / p.time.length();
        require(fp.den == 1 && tp.den == 1, "bi-tile does not sit on its own grid");
        out << "bi " << p.stretch.num << " " << p.stretch.den << " " << p.offset.num << " "
            << p.offset.den << " " << fs << " " << fp.num << " " << tp.num << "\n";
    }
    return out.str();
}

std::vector<bi_tile> parse_bi_tiles(const std::string& text) {
    std::vector<bi_tile> out;
    std::istringstream in(text);
    std::string kind;
    while (in >> kind) {
        require(kind == "bi", "unknown tile kind: " + kind);
        i64 sn, sd, on, od, fp, tp;
        int fs;
        in >> sn >> sd >> on >> od >> fs >> fp >> tp;
        require(bool(in), "truncated tile record");
        out.push_back(make_bi_tile(rat(sn, sd), rat(on, od), fs, fp, tp));
    }
    return out;
}

}  // namespace tfa
