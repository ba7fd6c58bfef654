#include "tfa/size_energy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>

#include "json.hpp"
#include "tfa/packets.hpp"

namespace tfa {

double chi_tilde(double x, const interval& I) {
    double d = std::fmod(std::abs(x - I.center().to_double()), 1.0);
    d = std::min(d, 1.0 - d);
    double r = d / I.length().to_double();
    return 1.0 / std::sqrt(1.0 + r * r);
}

namespace {

i64 fdiv(i64 a, i64 b) {  // floor division, b > 0
    return a >= 0 ? a / b : -((-a + b - 1) / b);
}

i64 rat_floor(const rat& q) { return fdiv(q.num, q.den); }

bool is_pow2(i64 v) { return v > 0 && (v & (v - 1)) == 0; }

int ilog2(i64 v) {
    int e = 0;
    while (v > 1) {
        v >>= 1;
        ++e;
    }
    return e;
}

// The exponent k with r = 2^k; refuses anything else.
int exact_log2(const rat& r) {
    if (r.den == 1 && is_pow2(r.num)) return ilog2(r.num);
    if (r.num == 1 && is_pow2(r.den)) return -ilog2(r.den);
    fail("interval length is not a power of two times the grid unit");
}

void check_depth(int depth) {
    require(depth >= 0 && depth <= 24, "search depth out of range");
}

struct tri_shape {
    int scale;  // freq cube side 2^scale, time length 2^-scale
    i64 tp;     // time position
};

tri_shape shape_of(const tri_tile& t) {
    tri_shape s;
    s.scale = t.freq.scale;
    rat q = t.time.lo / t.time.length();
    require(q.den == 1, "tri-tile does not sit on its own grid");
    s.tp = q.num;
    return s;
}

// Candidate tree tops for type-i trees: the collection tiles themselves plus
// grid ancestors up to `depth` coarser scales. An ancestor top at depth d has
// the d-fold dyadic time parent and any frequency edge e' of the coarser mesh
// with 3e' inside the 3-dilation of the tile's own edge, so the source tile
// stays a member. Only the time interval and the i-th edge of a top matter;
// synthesized tops repeat one edge position across all three coordinates.
std::vector<tri_tile> build_top_set(const std::vector<tri_tile>& tiles, int i, int depth) {
    check_depth(depth);
    std::vector<tri_tile> tops;
    std::set<std::array<i64, 4>> seen;  // scale, time pos, edge pos, shift
    for (const auto& t : tiles) {
        tri_shape sh = shape_of(t);
        int sigma = t.freq.shift[i - 1];
        if (seen.insert({sh.scale, sh.tp, t.freq.pos[i - 1], sigma}).second) tops.push_back(t);
        interval e3 = t.freq.edge(i - 1).dilate(rat(3));
        for (int d = 1; d <= depth; ++d) {
            int sc = sh.scale - d;
            i64 tp = fdiv(sh.tp, i64(1) << d);
            i64 mid = rat_floor(t.freq.edge(i - 1).center() / rat_pow2(sc));
            i64 radius = 3 * (i64(1) << d) + 2;
            for (i64 k = mid - radius; k <= mid + radius; ++k) {
                shifted_cube q{3, sc, {k, k, k}, t.freq.shift};
                if (!e3.contains(q.edge(i - 1).dilate(rat(3)))) continue;
                if (seen.insert({sc, tp, k, sigma}).second) tops.push_back(make_tri_tile(q, tp));
            }
        }
    }
    return tops;
}

// ---- max-weight antichain ----

struct flow_net {
    struct arc {
        int to;
        double cap;
        int rev;
    };
    std::vector<std::vector<arc>> g;
    std::vector<int> level, iter;
    double eps;

    explicit flow_net(int n, double eps_) : g(n), eps(eps_) {}

    // Returns the arc's position in g[a] so its flow can be read back.
    int add(int a, int b, double cap) {
        g[a].push_back({b, cap, int(g[b].size())});
        g[b].push_back({a, 0.0, int(g[a].size()) - 1});
        return int(g[a].size()) - 1;
    }

    bool bfs(int s, int t) {
        level.assign(g.size(), -1);
        std::queue<int> q;
        level[s] = 0;
        q.push(s);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (const arc& a : g[v]) {
                if (a.cap > eps && level[a.to] < 0) {
                    level[a.to] = level[v] + 1;
                    q.push(a.to);
                }
            }
        }
        return level[t] >= 0;
    }

    double dfs(int v, int t, double f) {
        if (v == t) return f;
        for (int& i = iter[v]; i < int(g[v].size()); ++i) {
            arc& a = g[v][i];
            if (a.cap > eps && level[v] < level[a.to]) {
                double d = dfs(a.to, t, std::min(f, a.cap));
                if (d > eps) {
                    a.cap -= d;
                    g[a.to][a.rev].cap += d;
                    return d;
                }
            }
        }
        return 0.0;
    }

    double maxflow(int s, int t) {
        double total = 0.0;
        while (bfs(s, t)) {
            iter.assign(g.size(), 0);
            for (;;) {
                double f = dfs(s, t, std::numeric_limits<double>::max());
                if (f <= eps) break;
                total += f;
            }
        }
        return total;
    }
};

struct antichain_result {
    double value = 0.0;
    std::vector<int> chosen;
};

// Maximum-weight antichain of a strict partial order, computed as the
// minimum flow through a split-node network whose lower bounds are the
// weights: every source-to-sink path is a chain, any feasible flow covers
// each element's demand, and the optimal residual cut crosses exactly the
// split arcs of one heaviest antichain.
antichain_result max_weight_antichain(const std::vector<double>& w,
                                      const std::vector<std::pair<int, int>>& below) {
    int n = int(w.size());
    antichain_result out;
    if (n == 0) return out;
    double total = 0.0;
    for (double x : w) {
        require(x >= 0.0, "antichain weights must be nonnegative");
        total += x;
    }
    double inf = total + 1.0;
    double eps = 1e-12 * inf;
    // nodes: s, t, then in/out per element, then the transform pair
    int s = 0, t = 1, xs = 2 + 2 * n, xt = 3 + 2 * n;
    auto in = [](int v) { return 2 + 2 * v; };
    auto outn = [](int v) { return 3 + 2 * v; };
    flow_net net(4 + 2 * n, eps);
    for (int v = 0; v < n; ++v) {
        net.add(in(v), outn(v), inf - w[v]);  // lower bound w[v] moved to the transform
        if (w[v] > 0.0) {
            net.add(xs, outn(v), w[v]);
            net.add(in(v), xt, w[v]);
        }
        net.add(s, in(v), inf);
        net.add(outn(v), t, inf);
    }
    for (auto [u, v] : below) net.add(outn(v), in(u), inf);  // chains run downward
    int ts_pos = net.add(t, s, inf);
    net.maxflow(xs, xt);
    // drop the circulation arc, then push back as much as possible
    net.g[t][ts_pos].cap = 0.0;
    net.g[s][net.g[t][ts_pos].rev].cap = 0.0;
    net.maxflow(t, s);
    // the side of the residual cut reachable from t marks the antichain
    std::vector<char> reach(net.g.size(), 0);
    std::queue<int> q;
    reach[t] = 1;
    q.push(t);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (const auto& a : net.g[v]) {
            if (a.cap > eps && !reach[a.to]) {
                reach[a.to] = 1;
                q.push(a.to);
            }
        }
    }
    for (int v = 0; v < n; ++v) {
        if (w[v] > 0.0 && reach[outn(v)] && !reach[in(v)]) {
            out.chosen.push_back(v);
            out.value += w[v];
        }
    }
    return out;
}

// Strict "u below v" in the containment order; ties broken by index so that
// equal tiles read as a chain and at most one of them is ever selected.
bool strictly_below(const tile& a, const tile& b, int ia, int ib) {
    if (!order_relate(a, b, tile_order::le_c)) return false;
    return !order_relate(b, a, tile_order::le_c) || ia < ib;
}

void check_component(int j) { require(j >= 1 && j <= 3, "component index out of range"); }

void check_keyed(std::size_t tiles, std::size_t coeffs) {
    require(tiles == coeffs, "coefficients are not keyed by the collection");
}

bool one_tri_grid(const std::vector<tri_tile>& tiles) {
    for (const auto& t : tiles)
        if (t.freq.shift != tiles[0].freq.shift) return false;
    return true;
}

double weight_sum(const std::vector<cplx>& coeffs, const std::vector<int>& members) {
    double s = 0.0;
    for (int m : members) s += std::norm(coeffs[m]);
    return s;
}

// ---- bi-tile grid bookkeeping ----

struct bi_shape {
    int fs;  // |omega| = stretch * 2^fs
    i64 k;   // frequency position
    i64 tp;  // time position
};

bi_shape shape_of(const bi_tile& p) {
    bi_shape s;
    s.fs = exact_log2(p.freq.length() / p.stretch);
    rat k = (p.freq.lo - p.offset) / p.freq.length();
    rat tp = p.time.lo / p.time.length();
    require(k.den == 1 && tp.den == 1, "bi-tile does not sit on its own grid");
    s.k = k.num;
    s.tp = tp.num;
    return s;
}

void check_bi_grid(const std::vector<bi_tile>& tiles) {
    for (const auto& p : tiles)
        require(p.same_grid(tiles[0]), "bi-tile collection spans mixed grids");
}

void check_sampled(const grid_function& g, const cutoff_function& cut) {
    require(g.n == cut.n, "grid size mismatch");
    cut.validate();
}

// integral |G| 1_{cutoff in omega} chi_tilde^C over the torus
double masked_mass(const grid_function& g, const cutoff_function& cut, const interval& om,
                   const interval& time, int chi_power) {
    double s = 0.0;
    for (int k = 0; k < g.n; ++k) {
        if (!om.contains(rat(cut[k]))) continue;
        s += std::abs(g[k]) * std::pow(chi_tilde(g.x(k), time), chi_power);
    }
    return s / double(g.n);
}

// Visits every ancestor P' of every collection tile up to `depth` scales,
// depth 0 meaning the tile itself.
template <typename F>
void for_each_ancestor(const std::vector<bi_tile>& tiles, int depth, F&& visit) {
    check_depth(depth);
    for (std::size_t idx = 0; idx < tiles.size(); ++idx) {
        bi_shape sh = shape_of(tiles[idx]);
        for (int d = 0; d <= depth; ++d) {
            i64 cells = i64(1) << d;
            i64 tp = fdiv(sh.tp, cells);
            for (i64 k = sh.k * cells; k < (sh.k + 1) * cells; ++k)
                visit(int(idx), make_bi_tile(tiles[idx].stretch, tiles[idx].offset, sh.fs - d, k, tp));
        }
    }
}

std::string one_line(const std::vector<bi_tile>& tiles) {
    std::string s = serialize(tiles);
    while (!s.empty() && s.back() == '\n') s.pop_back();
    return s;
}

std::string one_line(const std::vector<tri_tile>& tiles) {
    std::string s = serialize(tiles);
    while (!s.empty() && s.back() == '\n') s.pop_back();
    return s;
}

}  // namespace

std::string size_energy_report::to_json() const {
    nlohmann::json j;
    j["functional"] = functional;
    j["value"] = value;
    j["method"] = method;
    j["n_exponent"] = n_exponent;
    j["chosen"] = chosen;
    j["trees"] = nlohmann::json::array();
    for (const auto& t : trees)
        j["trees"].push_back({{"top", one_line(std::vector<tri_tile>{t.top})},
                              {"members", t.members},
                              {"type", t.j}});
    j["ancestors"] = nlohmann::json::array();
    for (const auto& p : ancestors) j["ancestors"].push_back(one_line(std::vector<bi_tile>{p}));
    return j.dump();
}

std::string estimate_report::to_json() const {
    nlohmann::json j;
    j["kind"] = kind;
    j["lhs"] = lhs;
    j["rhs"] = rhs;
    j["ratio"] = ratio;
    j["budget"] = budget;
    j["within_budget"] = within_budget;
    return j.dump();
}

size_energy_report size_j(const std::vector<tri_tile>& tiles, const std::vector<cplx>& coeffs,
                          int j, const size_energy_config& cfg) {
    check_component(j);
    check_keyed(tiles.size(), coeffs.size());
    size_energy_report r;
    r.functional = "size_" + std::to_string(j);
    if (tiles.empty()) return r;
    double best = -1.0;
    for (int i = 1; i <= 3; ++i) {
        if (i == j) continue;
        for (const auto& top : build_top_set(tiles, i, cfg.top_depth)) {
            tri_tree t = tree_members(tiles, top, i);
            if (t.members.empty()) continue;
            double v = std::sqrt(weight_sum(coeffs, t.members) / top.time.length().to_double());
            if (v > best) {
                best = v;
                r.trees = {t};
            }
        }
    }
    r.value = std::max(best, 0.0);
    return r;
}

size_energy_report energy_j(const std::vector<tri_tile>& tiles, const std::vector<cplx>& coeffs,
                            int j, const size_energy_config&) {
    check_component(j);
    check_keyed(tiles.size(), coeffs.size());
    size_energy_report r;
    r.functional = "energy_" + std::to_string(j);
    if (tiles.empty()) return r;
    require(one_tri_grid(tiles), "energy requires one grid");
    // zero-weight tiles never help an antichain, so only the rest enter
    std::vector<int> live;
    for (std::size_t m = 0; m < tiles.size(); ++m)
        if (std::norm(coeffs[m]) > 0.0) live.push_back(int(m));
    std::vector<double> w;
    w.reserve(live.size());
    for (int m : live) w.push_back(std::norm(coeffs[m]));
    std::vector<std::pair<int, int>> below;
    for (std::size_t a = 0; a < live.size(); ++a)
        for (std::size_t b = 0; b < live.size(); ++b) {
            if (a == b) continue;
            tile ca = tiles[live[a]].component(j - 1), cb = tiles[live[b]].component(j - 1);
            if (strictly_below(ca, cb, live[a], live[b])) below.push_back({int(a), int(b)});
        }
    antichain_result ac = max_weight_antichain(w, below);
    for (int v : ac.chosen) r.chosen.push_back(live[v]);
    std::sort(r.chosen.begin(), r.chosen.end());
    r.value = std::sqrt(ac.value);
    return r;
}

size_energy_report modified_energy_j(const std::vector<tri_tile>& tiles,
                                     const std::vector<cplx>& coeffs, int j,
                                     const size_energy_config& cfg) {
    check_component(j);
    check_keyed(tiles.size(), coeffs.size());
    size_energy_report r;
    r.functional = "modified_energy_" + std::to_string(j);
    r.method = "greedy-lower-bound";
    if (tiles.empty()) return r;
    double rmin = std::numeric_limits<double>::max(), rmax = 0.0;
    for (std::size_t m = 0; m < tiles.size(); ++m) {
        double a = std::abs(coeffs[m]);
        if (a == 0.0) continue;
        double nrm = a / std::sqrt(tiles[m].time.length().to_double());
        rmin = std::min(rmin, nrm);
        rmax = std::max(rmax, nrm);
    }
    if (rmax == 0.0) return r;
    int n_lo = int(std::floor(std::log2(rmin)));
    int n_hi = int(std::ceil(std::log2(rmax)));

    std::vector<tri_tile> tops = build_top_set(tiles, j, cfg.top_depth);
    int words = int(tiles.size() + 63) / 64;
    auto make_mask = [words](const std::vector<int>& members) {
        std::vector<std::uint64_t> mask(words, 0);
        for (int m : members) mask[m >> 6] |= std::uint64_t(1) << (m & 63);
        return mask;
    };
    std::vector<double> w(tiles.size());
    for (std::size_t m = 0; m < tiles.size(); ++m) w[m] = std::norm(coeffs[m]);
    auto masked_weight = [&](const std::vector<std::uint64_t>& a,
                             const std::vector<std::uint64_t>& b) {
        double s = 0.0;
        for (int q = 0; q < words; ++q) {
            std::uint64_t bits = a[q] & b[q];
            while (bits) {
                int m = q * 64 + std::countr_zero(bits);
                bits &= bits - 1;
                s += w[m];
            }
        }
        return s;
    };

    std::vector<std::vector<int>> top_members(tops.size());
    std::vector<std::vector<std::uint64_t>> top_mask(tops.size());
    for (std::size_t t = 0; t < tops.size(); ++t) {
        top_members[t] = tree_members(tiles, tops[t], j).members;
        top_mask[t] = make_mask(top_members[t]);
    }
    // subtree tops of every type, for the two-sided condition
    struct sub_top {
        double len;
        std::vector<std::uint64_t> mask;
    };
    std::vector<sub_top> subs;
    for (int ty = 1; ty <= 3; ++ty)
        for (const auto& st : build_top_set(tiles, ty, cfg.top_depth)) {
            std::vector<int> members = tree_members(tiles, st, ty).members;
            if (!members.empty())
                subs.push_back(sub_top{st.time.length().to_double(), make_mask(members)});
        }

    for (int n = n_lo; n <= n_hi; ++n) {
        double lower = std::ldexp(1.0, 2 * n);      // 4^n per unit |I_T|
        double upper = std::ldexp(1.0, 2 * n + 2);  // 4^{n+1} per unit |I_T'|
        std::vector<std::uint64_t> alive(words, 0);
        for (std::size_t m = 0; m < tiles.size(); ++m) alive[m >> 6] |= std::uint64_t(1) << (m & 63);
        std::vector<tri_tree> selected;
        double total_len = 0.0;
        for (;;) {
            int best = -1;
            std::vector<std::uint64_t> best_mask;
            for (std::size_t t = 0; t < tops.size(); ++t) {
                std::vector<std::uint64_t> mem(words);
                bool any = false;
                for (int q = 0; q < words; ++q) {
                    mem[q] = top_mask[t][q] & alive[q];
                    any = any || mem[q];
                }
                if (!any) continue;
                if (masked_weight(mem, mem) < lower * tops[t].time.length().to_double()) continue;
                // every subtree must stay under the cap; the extremal subtree
                // is the full intersection with any candidate subtree top
                bool capped = true;
                for (const auto& st : subs) {
                    if (masked_weight(mem, st.mask) > upper * st.len * (1.0 + 1e-12)) {
                        capped = false;
                        break;
                    }
                }
                if (!capped) continue;
                std::vector<int> mem_idx;
                for (int q = 0; q < words; ++q) {
                    std::uint64_t bits = mem[q];
                    while (bits) {
                        mem_idx.push_back(q * 64 + std::countr_zero(bits));
                        bits &= bits - 1;
                    }
                }
                tri_tree cand{tops[t], mem_idx, j};
                bool clear = true;
                for (const auto& sel : selected)
                    if (!strongly_disjoint(tiles, cand, sel, j).ok) {
                        clear = false;
                        break;
                    }
                if (!clear) continue;
                if (best >= 0) {
                    // prefer the highest frequency center of the j-th top
                    // edge, then the leftmost time, then the smallest scale
                    rat fc = tops[t].freq.edge(j - 1).center();
                    rat fb = tops[best].freq.edge(j - 1).center();
                    if (fc < fb) continue;
                    if (fc == fb) {
                        if (tops[best].time.lo < tops[t].time.lo) continue;
                        if (tops[best].time.lo == tops[t].time.lo &&
                            tops[best].time.length() <= tops[t].time.length())
                            continue;
                    }
                }
                best = int(t);
                best_mask = std::move(mem);
            }
            if (best < 0) break;
            std::vector<int> mem_idx;
            for (int q = 0; q < words; ++q) {
                alive[q] &= ~best_mask[q];
                std::uint64_t bits = best_mask[q];
                while (bits) {
                    mem_idx.push_back(q * 64 + std::countr_zero(bits));
                    bits &= bits - 1;
                }
            }
            total_len += tops[best].time.length().to_double();
            selected.push_back(tri_tree{tops[best], std::move(mem_idx), j});
        }
        if (selected.empty()) continue;
        double v = std::ldexp(1.0, n) * std::sqrt(total_len);
        if (v > r.value) {
            r.value = v;
            r.n_exponent = n;
            r.trees = std::move(selected);
        }
    }
    if (one_tri_grid(tiles)) {
        double e = energy_j(tiles, coeffs, j, cfg).value;
        require(r.value <= e * (1.0 + 1e-9) + 1e-12, "modified energy exceeded the energy");
    }
    return r;
}

namespace {

// Shared tree sweep for the L^p reformulations: the square function is
// piecewise constant on the member endpoints, so each tree is integrated
// exactly and `eval` turns one tree's piece list into the reported number.
template <typename F>
size_energy_report jn_sweep(const std::vector<tri_tile>& tiles, const std::vector<cplx>& coeffs,
                            int j, const size_energy_config& cfg, const std::string& name,
                            F&& eval) {
    check_component(j);
    check_keyed(tiles.size(), coeffs.size());
    size_energy_report r;
    r.functional = name;
    if (tiles.empty()) return r;
    double best = -1.0;
    for (int i = 1; i <= 3; ++i) {
        if (i == j) continue;
        for (const auto& top : build_top_set(tiles, i, cfg.top_depth)) {
            tri_tree t = tree_members(tiles, top, i);
            if (t.members.empty()) continue;
            std::vector<rat> cuts{top.time.lo, top.time.hi};
            for (int m : t.members) {
                cuts.push_back(tiles[m].time.lo);
                cuts.push_back(tiles[m].time.hi);
            }
            std::sort(cuts.begin(), cuts.end());
            cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
            std::vector<std::pair<double, double>> pieces;  // length, square function^2
            for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
                if (cuts[c] < top.time.lo || cuts[c + 1] > top.time.hi) continue;
                double g2 = 0.0;
                for (int m : t.members)
                    if (tiles[m].time.lo <= cuts[c] && cuts[c + 1] <= tiles[m].time.hi)
                        g2 += std::norm(coeffs[m]) / tiles[m].time.length().to_double();
                pieces.push_back({(cuts[c + 1] - cuts[c]).to_double(), g2});
            }
            double v = eval(pieces, top.time.length().to_double());
            if (v > best) {
                best = v;
                r.trees = {t};
            }
        }
    }
    r.value = std::max(best, 0.0);
    return r;
}

}  // namespace

size_energy_report size_jn_variant(const std::vector<tri_tile>& tiles,
                                   const std::vector<cplx>& coeffs, int j, double p,
                                   const size_energy_config& cfg) {
    require(p > 1.0 && std::isfinite(p), "exponent must lie in (1, infinity)");
    return jn_sweep(tiles, coeffs, j, cfg, "size_" + std::to_string(j) + "_lp",
                    [p](const std::vector<std::pair<double, double>>& pieces, double len) {
                        double s = 0.0;
                        for (auto [l, g2] : pieces) s += l * std::pow(g2, p / 2.0);
                        return std::pow(s, 1.0 / p) * std::pow(len, -1.0 / p);
                    });
}

size_energy_report size_jn_weak(const std::vector<tri_tile>& tiles,
                                const std::vector<cplx>& coeffs, int j,
                                const size_energy_config& cfg) {
    return jn_sweep(tiles, coeffs, j, cfg, "size_" + std::to_string(j) + "_weak",
                    [](std::vector<std::pair<double, double>> pieces, double len) {
                        // sup_v v * |{square function >= v}| over the finitely
                        // many attained values
                        std::sort(pieces.begin(), pieces.end(),
                                  [](auto& a, auto& b) { return a.second > b.second; });
                        double mass = 0.0, best = 0.0;
                        for (auto [l, g2] : pieces) {
                            mass += l;
                            best = std::max(best, std::sqrt(g2) * mass);
                        }
                        return best / len;
                    });
}

size_energy_report bitile_size(const std::vector<bi_tile>& tiles, const grid_function& g,
                               const cutoff_function& cut, bsize_mode mode,
                               const size_energy_config& cfg) {
    check_sampled(g, cut);
    size_energy_report r;
    r.functional = mode == bsize_mode::easy ? "bitile_size_easy" : "bitile_size";
    if (tiles.empty()) return r;
    int depth = mode == bsize_mode::easy ? 0 : cfg.ambient_depth;
    double best = -1.0;
    for_each_ancestor(tiles, depth, [&](int idx, const bi_tile& anc) {
        double v = masked_mass(g, cut, anc.freq, anc.time, cfg.chi_power) /
                   anc.time.length().to_double();
        if (v > best) {
            best = v;
            r.chosen = {idx};
            r.ancestors = {anc};
        }
    });
    r.value = std::max(best, 0.0);
    return r;
}

size_energy_report bitile_energy(const std::vector<bi_tile>& tiles, const grid_function& g,
                                 const cutoff_function& cut, benergy_mode mode,
                                 const size_energy_config& cfg) {
    check_sampled(g, cut);
    size_energy_report r;
    r.functional =
        mode == benergy_mode::plain ? "bitile_energy_plain" : "bitile_energy_modified";
    if (tiles.empty()) return r;
    check_bi_grid(tiles);
    // distinct ancestors, each remembering one tile it came from
    std::vector<bi_tile> cand;
    std::vector<int> source;
    for_each_ancestor(tiles, cfg.ambient_depth, [&](int idx, const bi_tile& anc) {
        for (const auto& c : cand)
            if (c == anc) return;
        cand.push_back(anc);
        source.push_back(idx);
    });
    std::vector<double> mass(cand.size());
    for (std::size_t c = 0; c < cand.size(); ++c)
        mass[c] = masked_mass(g, cut, cand[c].freq, cand[c].time, cfg.chi_power);

    auto run = [&](const std::vector<double>& w) {
        std::vector<std::pair<int, int>> below;
        for (std::size_t a = 0; a < cand.size(); ++a)
            for (std::size_t b = 0; b < cand.size(); ++b) {
                if (a == b || w[a] == 0.0 || w[b] == 0.0) continue;
                tile ta{cand[a].time, cand[a].freq}, tb{cand[b].time, cand[b].freq};
                if (strictly_below(ta, tb, int(a), int(b))) below.push_back({int(a), int(b)});
            }
        return max_weight_antichain(w, below);
    };

    if (mode == benergy_mode::plain) {
        antichain_result ac = run(mass);
        r.value = ac.value;
        for (int c : ac.chosen) {
            r.chosen.push_back(source[c]);
            r.ancestors.push_back(cand[c]);
        }
        return r;
    }
    double rmin = std::numeric_limits<double>::max(), rmax = 0.0;
    for (std::size_t c = 0; c < cand.size(); ++c) {
        if (mass[c] == 0.0) continue;
        double ratio = mass[c] / cand[c].time.length().to_double();
        rmin = std::min(rmin, ratio);
        rmax = std::max(rmax, ratio);
    }
    if (rmax == 0.0) return r;
    for (int n = int(std::floor(std::log2(rmin))); n <= int(std::floor(std::log2(rmax))); ++n) {
        double thr = std::ldexp(1.0, n);
        std::vector<double> w(cand.size(), 0.0);
        for (std::size_t c = 0; c < cand.size(); ++c)
            if (mass[c] >= thr * cand[c].time.length().to_double())
                w[c] = cand[c].time.length().to_double();
        antichain_result ac = run(w);
        double v = thr * ac.value;
        if (v > r.value) {
            r.value = v;
            r.n_exponent = n;
            r.chosen.clear();
            r.ancestors.clear();
            for (int c : ac.chosen) {
                r.chosen.push_back(source[c]);
                r.ancestors.push_back(cand[c]);
            }
        }
    }
    return r;
}

namespace {

const char* kind_name(estimate_kind k) {
    switch (k) {
        case estimate_kind::energy_lemma: return "energy-lemma";
        case estimate_kind::size_lemma: return "size-lemma";
        case estimate_kind::benergy: return "benergy";
        case estimate_kind::bsize: return "bsize";
        case estimate_kind::carleson_energy: return "carleson-energy";
        case estimate_kind::carleson_size: return "carleson-size";
        case estimate_kind::restriction: return "restriction";
    }
    fail("unknown estimate kind");
}

void need(bool ok, const char* what) {
    require(ok, std::string("estimate fixture is missing ") + what);
}

void check_indicator(const estimate_fixture& fx) {
    need(int(fx.set_e.size()) == fx.f.n, "an indicator matching the grid");
    for (int k = 0; k < fx.f.n; ++k) {
        require(fx.set_e[k] <= 1, "indicator entries must be 0 or 1");
        require(std::abs(fx.f[k]) <= double(fx.set_e[k]) + 1e-12,
                "function escapes the indicator majorant");
    }
}

double indicator_avg(const estimate_fixture& fx, const interval& I, int power) {
    double s = 0.0;
    for (int k = 0; k < fx.f.n; ++k)
        if (fx.set_e[k]) s += std::pow(chi_tilde(fx.f.x(k), I), power);
    return s / double(fx.f.n);
}

}  // namespace

estimate_report estimate_bounds_check(estimate_kind kind, const estimate_fixture& fx,
                                      double budget, const size_energy_config& cfg) {
    estimate_report r;
    r.kind = kind_name(kind);
    r.budget = budget;
    switch (kind) {
        case estimate_kind::energy_lemma: {
            need(fx.f.n > 0, "a function");
            need(!fx.tris.empty(), "tri-tiles");
            coefficient_sequence a = coefficients(fx.f, fx.tris, fx.j, fx.family);
            r.lhs = modified_energy_j(fx.tris, a.values, fx.j, cfg).value;
            r.rhs = norm_l2(fx.f);
            break;
        }
        case estimate_kind::size_lemma: {
            need(fx.f.n > 0, "a function");
            need(!fx.tris.empty(), "tri-tiles");
            check_indicator(fx);
            coefficient_sequence a = coefficients(fx.f, fx.tris, fx.j, fx.family);
            r.lhs = size_j(fx.tris, a.values, fx.j, cfg).value;
            for (const auto& t : fx.tris)
                r.rhs = std::max(r.rhs, indicator_avg(fx, t.time, fx.decay_order) /
                                            t.time.length().to_double());
            break;
        }
        case estimate_kind::benergy: {
            need(fx.f.n > 0, "a function");
            need(!fx.bis.empty(), "bi-tiles");
            need(fx.cut.has_value(), "a cutoff");
            r.lhs = bitile_energy(fx.bis, fx.f, *fx.cut, benergy_mode::modified, cfg).value;
            r.rhs = norm_l1(fx.f);
            break;
        }
        case estimate_kind::bsize: {
            need(fx.f.n > 0, "a function");
            need(!fx.bis.empty(), "bi-tiles");
            need(fx.cut.has_value(), "a cutoff");
            check_indicator(fx);
            r.lhs = bitile_size(fx.bis, fx.f, *fx.cut, bsize_mode::full, cfg).value;
            for_each_ancestor(fx.bis, cfg.ambient_depth, [&](int, const bi_tile& anc) {
                r.rhs = std::max(r.rhs, indicator_avg(fx, anc.time, fx.decay_order) /
                                            anc.time.length().to_double());
            });
            break;
        }
        case estimate_kind::carleson_energy:
        case estimate_kind::carleson_size: {
            need(fx.f.n > 0, "a function");
            need(!fx.tris.empty(), "tri-tiles");
            need(!fx.bis.empty(), "bi-tiles");
            need(fx.cut.has_value(), "a cutoff");
            check_indicator(fx);
            std::vector<cplx> a = adjoint_coefficients(fx.tris, fx.bis, fx.f, *fx.cut, fx.families);
            if (kind == estimate_kind::carleson_energy) {
                r.lhs = modified_energy_j(fx.tris, a, 3, cfg).value;
                double m = 0.0;
                for (int k = 0; k < fx.f.n; ++k) m += fx.set_e[k];
                r.rhs = std::sqrt(m / double(fx.f.n));
            } else {
                r.lhs = size_j(fx.tris, a, 3, cfg).value;
                for (const auto& t : fx.tris)
                    r.rhs = std::max(
                        r.rhs, std::pow(indicator_avg(fx, t.time, 1) / t.time.length().to_double(),
                                        1.0 / (1.0 + fx.eps)));
            }
            break;
        }
        case estimate_kind::restriction: {
            need(fx.f.n > 0, "a function");
            need(!fx.tris.empty(), "tri-tiles");
            need(!fx.bis.empty(), "bi-tiles");
            need(fx.cut.has_value(), "a cutoff");
            need(fx.tree_top.has_value(), "a tree top");
            require(fx.tree_i == 1 || fx.tree_i == 2, "tree type must be 1 or 2");
            check_indicator(fx);
            tri_tree t = tree_members(fx.tris, *fx.tree_top, fx.tree_i);
            std::vector<bi_tile> linked;
            for (const auto& p : fx.bis)
                for (int m : t.members)
                    if (p.half(1).freq.contains(fx.tris[m].component(2).freq)) {
                        linked.push_back(p);
                        break;
                    }
            grid_function c = linked.empty() ? grid_function(fx.f.n)
                                             : carleson_adjoint(linked, fx.f, *fx.cut, fx.family);
            interval it = fx.tree_top->time;
            double e = 1.0 + fx.eps, lhs = 0.0, rhs = 0.0;
            for (int k = 0; k < fx.f.n; ++k) {
                lhs += std::pow(std::abs(c[k]), e) * std::pow(chi_tilde(c.x(k), it), fx.decay_order);
                if (fx.set_e[k]) rhs += chi_tilde(c.x(k), it);
            }
            r.lhs = std::pow(lhs / double(fx.f.n), 1.0 / e);
            r.rhs = std::pow(rhs / double(fx.f.n), 1.0 / e);
            break;
        }
    }
    if (r.rhs > 0.0) {
        r.ratio = r.lhs / r.rhs;
        r.within_budget = budget <= 0.0 || r.ratio <= budget;
    } else {
        r.ratio = r.lhs > 1e-12 ? std::numeric_limits<double>::infinity() : 0.0;
        r.within_budget = r.lhs <= 1e-12;
    }
    require(budget <= 0.0 || r.within_budget,
            "estimate exceeded its budget (" + std::string(r.kind) + ")");
    return r;
}

}  // namespace tfa
