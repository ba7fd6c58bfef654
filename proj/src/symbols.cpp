#include "tfa/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace tfa {

namespace {

double smooth_sigma(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// C-infinity descent from 1 at t = 0 to 0 at t = 1
double step_down(double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    double a = smooth_sigma(1.0 - t), b = smooth_sigma(t);
    return a / (a + b);
}

// mother cutoff transform: 1 on [-1/16, 1/16], supported on [-1/8, 1/8]
double phi_hat(double u) {
    double a = std::abs(u);
    if (a <= 1.0 / 16) return 1.0;
    if (a >= 1.0 / 8) return 0.0;
    return step_down((a - 1.0 / 16) * 16.0);
}

double bump_profile(double u, const whitney_config& cfg) {
    double a = std::abs(u);
    if (a <= cfg.core) return 1.0;
    if (a >= cfg.edge) return 0.0;
    return step_down((a - cfg.core) / (cfg.edge - cfg.core));
}

double frac(double x) { return x - std::floor(x); }

// Sum of phi_hat(2(t - v) - 1/2) over the midpoint lattice t = frac(t0 + (i+1/2)/steps)
// restricted to t in [lo_extra, hi_extra] and the right-half window [1/2, 1).
double window_sum(double anchor, double scale, int steps, double v, double lo_extra,
                  double hi_extra) {
    double lo = std::max({0.5, v + 3.0 / 16, lo_extra});
    double hi = std::min({1.0, v + 5.0 / 16, hi_extra});
    if (lo >= hi) return 0.0;
    double t0 = frac(anchor / scale);
    double total = 0.0;
    for (int wrap = 0; wrap <= 1; ++wrap) {
        double ulo = lo - t0 + wrap, uhi = hi - t0 + wrap;
        int ilo = std::max(0, (int)std::ceil(ulo * steps - 0.5));
        int ihi = std::min(steps - 1, (int)std::floor(uhi * steps - 0.5));
        for (int i = ilo; i <= ihi; ++i) {
            double t = t0 + (i + 0.5) / steps - wrap;
            total += phi_hat(2.0 * (t - v) - 0.5);
        }
    }
    return total;
}

constexpr double kScaleWindowLo = 3.0 / 16;  // v = w / |omega| range with nonzero mass
constexpr double kScaleWindowHi = 13.0 / 16;

const double kSqrt3 = std::sqrt(3.0);

shift3 decode_shift(int sigma_index) {
    return shift3{sigma_index / 9, (sigma_index / 3) % 3, sigma_index % 3};
}

void cube_bounds(const shifted_cube& q, std::array<double, 3>& lo, std::array<double, 3>& hi) {
    for (int i = 0; i < 3; ++i) {
        interval e = q.edge(i);
        lo[i] = e.lo.to_double();
        hi[i] = e.hi.to_double();
    }
}

// distance of x to the line {x1 = x2, x1 + x2 + x3 = 0} = span of (1, 1, -2)
double point_line_distance(const std::array<double, 3>& x) {
    double proj = (x[0] + x[1] - 2.0 * x[2]);
    double d2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - proj * proj / 6.0;
    return d2 > 0.0 ? std::sqrt(d2) : 0.0;
}

}  // namespace

size_t symbol2d::index(int xi1, int xi2) const {
    int h = n / 2;
    require(xi1 >= -h && xi1 < h && xi2 >= -h && xi2 < h, "frequency outside symbol grid");
    return size_t(xi2 + h) * size_t(n) + size_t(xi1 + h);
}

double symbol2d::sup_abs() const {
    double s = 0.0;
    for (const auto& v : values) s = std::max(s, std::abs(v));
    return s;
}

void symbol2d::validate(double tol) const {
    require(int(values.size()) == n * n, "symbol table size mismatch");
    double s = sup_abs();
    if (s > 1.0 + tol) fail("symbol exceeds the unit bound: sup = " + std::to_string(s));
}

symbol2d cone_indicator(int n, int cutoff) {
    check_grid_size(n);
    require(cutoff >= -n / 2 && cutoff <= n / 2, "cutoff outside frequency range");
    symbol2d m(n, singular_kind::cone_boundary);
    m.cutoff = cutoff;
    for (int xi2 = -n / 2; xi2 < n / 2; ++xi2) {
        for (int xi1 = -n / 2; xi1 < n / 2; ++xi1) {
            m.at(xi1, xi2) = (xi1 < xi2 && xi2 < cutoff) ? cplx(1.0) : cplx(0.0);
        }
    }
    return m;
}

double cutoff_normalization() {
    // (1 / 2 ln 2) Int phi_hat(u) ln((3/2 - u)/(1/2 - u)) du by composite Simpson
    static const double value = [] {
        const int n = 1 << 14;
        const double a = -0.125, b = 0.125, h = (b - a) / n;
        auto f = [](double u) { return phi_hat(u) * std::log((1.5 - u) / (0.5 - u)); };
        double acc = f(a) + f(b);
        for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
        return acc * h / 3.0 / (2.0 * std::log(2.0));
    }();
    return value;
}

std::vector<scale_term> cutoff_scale_terms(double anchor, double target, const quad_params& q) {
    require(q.eta_steps > 0 && q.k_phases > 0 && q.k_lo < q.k_hi, "bad quadrature parameters");
    std::vector<scale_term> out;
    double w = anchor - target;
    if (!(w > 0.0)) return out;
    for (int ik = 0; ik < q.k_phases; ++ik) {
        double kappa = (ik + 0.5) / q.k_phases;
        int jlo = (int)std::floor(std::log2(w / kScaleWindowHi) - kappa) - 1;
        int jhi = (int)std::ceil(std::log2(w / kScaleWindowLo) - kappa) + 1;
        for (int j = jlo; j <= jhi; ++j) {
            double scale = std::exp2(kappa + j);
            double v = w / scale;
            if (v <= kScaleWindowLo || v >= kScaleWindowHi) continue;
            double g = window_sum(anchor, scale, q.eta_steps, v, -1e30, 1e30);
            if (g > 0.0) out.push_back({scale, g / (double(q.eta_steps) * q.k_phases)});
        }
    }
    return out;
}

double averaged_cutoff_value(double anchor, double target, const quad_params& q) {
    double acc = 0.0;
    for (const auto& t : cutoff_scale_terms(anchor, target, q)) acc += t.weight;
    return acc / cutoff_normalization();
}

std::vector<double> averaged_cutoff(int n, int cutoff, const quad_params& q) {
    check_grid_size(n);
    require(cutoff >= -n / 2 && cutoff <= n / 2, "cutoff outside frequency range");
    std::vector<double> out(n, 0.0);
    for (int xi = -n / 2; xi < n / 2; ++xi) {
        out[xi + n / 2] = averaged_cutoff_value(cutoff, xi, q);
    }
    return out;
}

double line_distance(const std::array<double, 3>& lo, const std::array<double, 3>& hi) {
    // the line is t (1, 1, -2); residuals are piecewise linear in t
    const std::array<double, 3> dir{1.0, 1.0, -2.0};
    std::vector<double> breaks;
    for (int i = 0; i < 3; ++i) {
        breaks.push_back(lo[i] / dir[i]);
        breaks.push_back(hi[i] / dir[i]);
    }
    std::sort(breaks.begin(), breaks.end());
    std::vector<double> pts;
    pts.push_back(breaks.front() - 1e9);
    for (double b : breaks) pts.push_back(b);
    pts.push_back(breaks.back() + 1e9);

    auto dist2 = [&](double t) {
        double acc = 0.0;
        for (int i = 0; i < 3; ++i) {
            double p = dir[i] * t;
            double r = p < lo[i] ? lo[i] - p : (p > hi[i] ? p - hi[i] : 0.0);
            acc += r * r;
        }
        return acc;
    };

    double best = dist2(pts.front());
    for (size_t seg = 0; seg + 1 < pts.size(); ++seg) {
        double ta = pts[seg], tb = pts[seg + 1];
        if (!(ta < tb)) continue;
        double tm = 0.5 * (ta + tb);
        // quadratic A t^2 + B t + C on this segment
        double A = 0.0, B = 0.0, C = 0.0;
        for (int i = 0; i < 3; ++i) {
            double p = dir[i] * tm;
            double slope, inter;
            if (p < lo[i]) {
                slope = -dir[i];
                inter = lo[i];
            } else if (p > hi[i]) {
                slope = dir[i];
                inter = -hi[i];
            } else {
                continue;
            }
            A += slope * slope;
            B += 2.0 * slope * inter;
            C += inter * inter;
        }
        double cand = std::min(dist2(ta), dist2(tb));
        if (A > 0.0) {
            double tv = std::clamp(-B / (2.0 * A), ta, tb);
            cand = std::min(cand, A * tv * tv + B * tv + C);
        } else if (A == 0.0 && B == 0.0) {
            cand = std::min(cand, C);
        }
        best = std::min(best, cand);
    }
    return best > 0.0 ? std::sqrt(best) : 0.0;
}

double cube_bump(const shifted_cube& q, const whitney_config& cfg, const std::array<double, 3>& x) {
    std::array<double, 3> lo, hi;
    cube_bounds(q, lo, hi);
    double b = 1.0;
    for (int i = 0; i < 3; ++i) {
        double c = 0.5 * (lo[i] + hi[i]), half = 0.5 * (hi[i] - lo[i]);
        b *= bump_profile((x[i] - c) / half, cfg);
        if (b == 0.0) return 0.0;
    }
    return b;
}

bool whitney_eval::kept(int scale, int sigma_index, const std::array<i64, 3>& pos) {
    std::array<i64, 5> key{scale, sigma_index, pos[0], pos[1], pos[2]};
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    shifted_cube q;
    q.dim = 3;
    q.scale = scale;
    q.pos = pos;
    q.shift = decode_shift(sigma_index);
    std::array<double, 3> lo, hi;
    cube_bounds(q, lo, hi);
    double dist = line_distance(lo, hi);
    double diam = kSqrt3 * std::exp2(scale);
    bool ok = cfg_.c1 * diam <= dist && dist <= cfg_.c2 * diam;
    cache_.emplace(key, ok);
    return ok;
}

std::vector<whitney_eval::hit> whitney_eval::cover(const std::array<double, 3>& x) {
    std::vector<hit> hits;
    double d = point_line_distance(x);
    if (d < 0x1p-20) return hits;  // on or numerically on the singular line
    int jlo = (int)std::floor(std::log2(d / ((cfg_.c2 + 1.0) * kSqrt3)));
    int jhi = (int)std::ceil(std::log2(d / (cfg_.c1 * kSqrt3)));
    jlo = std::max(jlo, -60);
    jhi = std::min(jhi, 60);
    for (int j = jlo; j <= jhi; ++j) {
        double side = std::exp2(j);
        int sgn = (j % 2 != 0) ? -1 : 1;
        for (int sigma = 0; sigma < 27; ++sigma) {
            shift3 sh = decode_shift(sigma);
            std::array<i64, 3> pos;
            for (int i = 0; i < 3; ++i) {
                pos[i] = (i64)std::floor(x[i] / side - sgn * sh[i] / 3.0);
            }
            shifted_cube q;
            q.dim = 3;
            q.scale = j;
            q.pos = pos;
            q.shift = sh;
            double b = cube_bump(q, cfg_, x);
            if (b <= 0.0) continue;
            if (!kept(j, sigma, pos)) continue;
            hits.push_back({q, sigma, b});
        }
    }
    return hits;
}

double whitney_eval::partition_value(const shifted_cube& q, const std::array<double, 3>& x) {
    if (cube_bump(q, cfg_, x) <= 0.0) return 0.0;
    auto hits = cover(x);
    double total = 0.0;
    double own = -1.0;
    for (const auto& h : hits) {
        total += h.bump;
        if (h.cube == q) own = h.bump;
    }
    if (own < 0.0) fail("cube is not a member of the partition at this point");
    return own / total;
}

whitney_decomposition whitney_decompose(int n, const whitney_config& cfg, bool with_classes) {
    check_grid_size(n);
    require(cfg.c1 > 0 && cfg.c1 < cfg.c2, "whitney constants must satisfy 0 < c1 < c2");
    require(cfg.core > 0 && cfg.core < cfg.edge && cfg.edge < 1.0, "bad bump profile");
    whitney_decomposition out;
    out.config = cfg;
    out.n = n;
    whitney_eval eval(cfg);
    std::map<std::array<i64, 5>, int> seen;
    for (int xi1 = -n / 2; xi1 < n / 2; ++xi1) {
        for (int xi2 = -n / 2; xi2 < n / 2; ++xi2) {
            if (xi1 == xi2) continue;
            std::array<double, 3> x{double(xi1), double(xi2), double(-xi1 - xi2)};
            auto hits = eval.cover(x);
            if (hits.empty()) {
                fail("whitney constants (" + std::to_string(cfg.c1) + ", " +
                     std::to_string(cfg.c2) + ") leave frequency point (" + std::to_string(xi1) +
                     ", " + std::to_string(xi2) + ") uncovered");
            }
            int side = xi1 < xi2 ? 1 : -1;
            for (const auto& h : hits) {
                std::array<i64, 5> key{h.cube.scale, h.sigma_index, h.cube.pos[0], h.cube.pos[1],
                                       h.cube.pos[2]};
                auto it = seen.find(key);
                if (it == seen.end()) {
                    std::array<double, 3> lo, hi;
                    cube_bounds(h.cube, lo, hi);
                    out.cubes.push_back({h.cube, h.sigma_index, line_distance(lo, hi), side});
                    seen.emplace(key, int(out.cubes.size()) - 1);
                } else {
                    require(out.cubes[it->second].cone_side == side,
                            "whitney cube slices both sides of the diagonal");
                }
            }
        }
    }
    if (with_classes) {
        rank1_config rcfg;
        for (int sigma = 0; sigma < 27; ++sigma) {
            std::vector<int> group;
            std::vector<shifted_cube> cubes;
            for (int i = 0; i < int(out.cubes.size()); ++i) {
                if (out.cubes[i].sigma_index == sigma) {
                    group.push_back(i);
                    cubes.push_back(out.cubes[i].cube);
                }
            }
            if (cubes.empty()) continue;
            sparsify_result sp = sparsify(cubes, rat(8));
            for (const auto& part : sp.parts) {
                std::vector<std::vector<int>> local;  // indices into `part`
                for (int idx : part) {
                    bool placed = false;
                    for (auto& cls : local) {
                        bool ok = true;
                        for (int other : cls) {
                            std::vector<shifted_cube> pair{cubes[other], cubes[idx]};
                            if (!check_rank1(pair, rcfg).ok) {
                                ok = false;
                                break;
                            }
                        }
                        if (ok) {
                            cls.push_back(idx);
                            placed = true;
                            break;
                        }
                    }
                    if (!placed) local.push_back({idx});
                }
                for (const auto& cls : local) {
                    std::vector<int> global;
                    std::vector<shifted_cube> members;
                    for (int idx : cls) {
                        global.push_back(group[idx]);
                        members.push_back(cubes[idx]);
                    }
                    require(is_sparse(members, rat(8)).ok, "rank-1 class lost sparseness");
                    require(check_rank1(members, rcfg).ok, "rank-1 refinement failed");
                    out.classes.push_back(std::move(global));
                }
            }
        }
    }
    return out;
}

symbol2d build_m_doubleprime(int n, int cutoff, const quad_params& q) {
    check_grid_size(n);
    require(cutoff >= -n / 2 && cutoff <= n / 2, "cutoff outside frequency range");
    const double cinv = cutoff_normalization();

    // per-target scale terms, sorted by scale with prefix-summed weights
    struct table {
        std::vector<double> scales;
        std::vector<double> prefix;
    };
    std::vector<table> tables(n);
    for (int xi = -n / 2; xi < n / 2; ++xi) {
        auto terms = cutoff_scale_terms(cutoff, xi, q);
        std::sort(terms.begin(), terms.end(),
                  [](const scale_term& a, const scale_term& b) { return a.scale < b.scale; });
        table& t = tables[xi + n / 2];
        double acc = 0.0;
        for (const auto& s : terms) {
            t.scales.push_back(s.scale);
            acc += s.weight;
            t.prefix.push_back(acc);
        }
    }

    symbol2d m(n, singular_kind::cutoff_line);
    m.cutoff = cutoff;
    for (int xi1 = -n / 2; xi1 < n / 2; ++xi1) {
        const table& outer = tables[xi1 + n / 2];
        for (int xi2 = -n / 2; xi2 < n / 2; ++xi2) {
            const table& inner = tables[xi2 + n / 2];
            if (outer.scales.empty() || inner.scales.empty()) continue;
            double acc = 0.0;
            for (size_t i = 0; i < outer.scales.size(); ++i) {
                // inner scales capped at the outer scale, inclusively
                auto it = std::upper_bound(inner.scales.begin(), inner.scales.end(),
                                           outer.scales[i]);
                if (it != inner.scales.begin()) {
                    double w = outer.prefix[i] - (i ? outer.prefix[i - 1] : 0.0);
                    acc += w * inner.prefix[(it - inner.scales.begin()) - 1];
                }
            }
            m.at(xi1, xi2) = acc / (cinv * cinv);
        }
    }
    m.validate();
    return m;
}

symbol2d build_m_prime(int n, int cutoff, const quad_params& q, const whitney_config& wcfg) {
    check_grid_size(n);
    require(cutoff >= -n / 2 && cutoff <= n / 2, "cutoff outside frequency range");
    const double cinv = cutoff_normalization();
    const double anchor = 2.0 * cutoff;
    whitney_eval eval(wcfg);
    std::map<std::array<i64, 4>, double> wcache;  // (scale, sigma3, k3, s) -> weight sum

    symbol2d m(n, singular_kind::diagonal_line);
    m.cutoff = cutoff;
    for (int xi1 = -n / 2; xi1 < n / 2; ++xi1) {
        for (int xi2 = xi1 + 1; xi2 < n / 2; ++xi2) {
            int s = xi1 + xi2;
            double w = anchor - s;
            if (!(w > 0.0)) continue;
            std::array<double, 3> x{double(xi1), double(xi2), double(-s)};
            auto hits = eval.cover(x);
            if (hits.empty()) {
                fail("whitney cover missing at (" + std::to_string(xi1) + ", " +
                     std::to_string(xi2) + "); widen the constants");
            }
            double total = 0.0;
            for (const auto& h : hits) total += h.bump;
            double acc = 0.0;
            for (const auto& h : hits) {
                std::array<i64, 4> key{h.cube.scale, h.sigma_index % 3, h.cube.pos[2], s};
                auto it = wcache.find(key);
                double weight;
                if (it != wcache.end()) {
                    weight = it->second;
                } else {
                    // average of the cutoff sum restricted to omega whose left
                    // half contains the reflected third edge of the cube
                    interval e3 = h.cube.edge(2);
                    double a3 = e3.lo.to_double();
                    double side = std::exp2(h.cube.scale);
                    weight = 0.0;
                    for (int ik = 0; ik < q.k_phases; ++ik) {
                        double kappa = (ik + 0.5) / q.k_phases;
                        int jlo = (int)std::floor(std::log2(w / kScaleWindowHi) - kappa) - 1;
                        int jhi = (int)std::ceil(std::log2(w / kScaleWindowLo) - kappa) + 1;
                        for (int j = jlo; j <= jhi; ++j) {
                            double scale = std::exp2(kappa + j);
                            double v = w / scale;
                            if (v <= kScaleWindowLo || v >= kScaleWindowHi) continue;
                            double t_lo = (anchor + a3 + side) / scale;
                            double t_hi = (anchor + a3) / scale + 0.5;
                            weight += window_sum(anchor, scale, q.eta_steps, v, t_lo, t_hi);
                        }
                    }
                    weight /= double(q.eta_steps) * q.k_phases;
                    wcache.emplace(key, weight);
                }
                acc += (h.bump / total) * weight;
            }
            m.at(xi1, xi2) = acc / cinv;
        }
    }
    m.validate();
    return m;
}

symbol2d m_tripleprime_from(const symbol2d& mp, const symbol2d& mpp) {
    require(mp.n == mpp.n, "symbol grids differ");
    require(mp.cutoff.has_value() && mp.cutoff == mpp.cutoff, "symbol cutoffs differ");
    symbol2d m = cone_indicator(mp.n, *mp.cutoff);
    for (size_t i = 0; i < m.values.size(); ++i) m.values[i] -= mp.values[i] + mpp.values[i];
    m.singular = singular_kind::cutoff_vertex;
    m.validate();
    return m;
}

symbol2d build_m_tripleprime(int n, int cutoff, const quad_params& q, const whitney_config& w) {
    return m_tripleprime_from(build_m_prime(n, cutoff, q, w), build_m_doubleprime(n, cutoff, q));
}

cplx bump_factorization::coeff(int l1, int l2, int l3) const {
    int m = 2 * lmax + 1;
    require(std::abs(l1) <= lmax && std::abs(l2) <= lmax && std::abs(l3) <= lmax,
            "mode outside the kept block");
    return coeffs[size_t(l3 + lmax) * m * m + size_t(l2 + lmax) * m + size_t(l1 + lmax)];
}

bump_factorization factor_bumps(const whitney_cube& q, const whitney_config& cfg, int lmax,
                                int samples) {
    require(lmax >= 1 && samples >= 4 * lmax + 4, "need more samples than kept modes");
    const int M = samples;
    std::array<double, 3> lo, hi;
    cube_bounds(q.cube, lo, hi);
    std::array<double, 3> center;
    for (int i = 0; i < 3; ++i) center[i] = 0.5 * (lo[i] + hi[i]);
    double side = hi[0] - lo[0];
    double period = 0.9 * side;

    whitney_eval eval(cfg);
    auto node = [&](int idx, int axis) {
        return center[axis] - 0.5 * period + (idx + 0.5) * period / M;
    };
    std::vector<double> psi(size_t(M) * M * M);
    for (int c = 0; c < M; ++c) {
        for (int b = 0; b < M; ++b) {
            for (int a = 0; a < M; ++a) {
                std::array<double, 3> x{node(a, 0), node(b, 1), node(c, 2)};
                psi[(size_t(c) * M + b) * M + a] = eval.partition_value(q.cube, x);
            }
        }
    }

    // separable transform; node offsets fold into per-axis phases
    std::vector<cplx> data(psi.begin(), psi.end());
    std::vector<cplx> line(M), twist(size_t(M) * M);
    for (int l = 0; l < M; ++l) {
        int signed_l = l < M / 2 ? l : l - M;
        for (int idx = 0; idx < M; ++idx) {
            twist[size_t(l) * M + idx] =
                unit_phase(-double(signed_l) * (idx + 0.5 - 0.5 * M) / M);
        }
    }
    for (int axis = 0; axis < 3; ++axis) {
        size_t stride = 1;
        for (int i = 0; i < axis; ++i) stride *= M;
        for (size_t base = 0; base < data.size(); ++base) {
            if ((base / stride) % M != 0) continue;
            for (int l = 0; l < M; ++l) {
                cplx acc(0.0);
                for (int idx = 0; idx < M; ++idx) {
                    acc += data[base + stride * idx] * twist[size_t(l) * M + idx];
                }
                line[l] = acc / double(M);
            }
            for (int l = 0; l < M; ++l) data[base + stride * l] = line[l];
        }
    }

    bump_factorization out;
    out.lmax = lmax;
    out.samples = samples;
    out.period = period;
    int block = 2 * lmax + 1;
    out.coeffs.assign(size_t(block) * block * block, cplx(0.0));
    auto mode = [&](int l) { return l >= 0 ? l : l + M; };
    double tail = 0.0;
    for (int l3 = -M / 2; l3 < M / 2; ++l3) {
        for (int l2 = -M / 2; l2 < M / 2; ++l2) {
            for (int l1 = -M / 2; l1 < M / 2; ++l1) {
                cplx v = data[(size_t(mode(l3)) * M + mode(l2)) * M + mode(l1)];
                if (std::max({std::abs(l1), std::abs(l2), std::abs(l3)}) <= lmax) {
                    out.coeffs[size_t(l3 + lmax) * block * block + size_t(l2 + lmax) * block +
                               size_t(l1 + lmax)] = v;
                } else {
                    tail += std::abs(v);
                }
            }
        }
    }
    out.tail = tail;

    double worst = 0.0;
    for (int c = 0; c < M; ++c) {
        for (int b = 0; b < M; ++b) {
            for (int a = 0; a < M; ++a) {
                cplx acc(0.0);
                for (int l3 = -lmax; l3 <= lmax; ++l3) {
                    for (int l2 = -lmax; l2 <= lmax; ++l2) {
                        for (int l1 = -lmax; l1 <= lmax; ++l1) {
                            double turns = (l1 * (a + 0.5 - 0.5 * M) + l2 * (b + 0.5 - 0.5 * M) +
                                            l3 * (c + 0.5 - 0.5 * M)) /
                                           M;
                            acc += out.coeff(l1, l2, l3) * unit_phase(turns);
                        }
                    }
                }
                worst = std::max(worst, std::abs(acc - psi[(size_t(c) * M + b) * M + a]));
            }
        }
    }
    out.recon_error = worst;
    return out;
}

mmh_report check_mmh(const symbol2d& m, std::array<int, 2> center, int max_order) {
    require(max_order >= 0 && max_order <= 3, "finite differences degrade beyond order 3");
    int h = m.n / 2;
    if (center[0] < -h || center[0] >= h || center[1] < -h || center[1] >= h) {
        fail("difference center outside the frequency grid");
    }

    // iterated central differences, indexed [a1][a2]
    std::vector<std::vector<std::vector<cplx>>> tables(
        max_order + 1, std::vector<std::vector<cplx>>(max_order + 1));
    tables[0][0] = m.values;
    auto at = [&](const std::vector<cplx>& t, int xi1, int xi2) -> cplx {
        return t[size_t(xi2 + h) * m.n + (xi1 + h)];
    };
    for (int a1 = 0; a1 <= max_order; ++a1) {
        for (int a2 = 0; a2 <= max_order - a1; ++a2) {
            if (a1 == 0 && a2 == 0) continue;
            int p1 = a1 ? a1 - 1 : 0, p2 = a1 ? a2 : a2 - 1;
            const auto& prev = tables[p1][p2];
            std::vector<cplx> cur(prev.size(), cplx(0.0));
            for (int xi2 = -h + a2; xi2 < h - a2; ++xi2) {
                for (int xi1 = -h + a1; xi1 < h - a1; ++xi1) {
                    cplx d = a1 ? (at(prev, xi1 + 1, xi2) - at(prev, xi1 - 1, xi2)) * 0.5
                                : (at(prev, xi1, xi2 + 1) - at(prev, xi1, xi2 - 1)) * 0.5;
                    cur[size_t(xi2 + h) * m.n + (xi1 + h)] = d;
                }
            }
            tables[a1][a2] = std::move(cur);
        }
    }

    mmh_report report;
    report.max_order = max_order;
    for (int order = 0; order <= max_order; ++order) {
        double omax = 0.0;
        for (int a1 = order; a1 >= 0; --a1) {
            int a2 = order - a1;
            double best = 0.0;
            for (int xi2 = -h + a2; xi2 < h - a2; ++xi2) {
                for (int xi1 = -h + a1; xi1 < h - a1; ++xi1) {
                    if (xi1 == center[0] && xi2 == center[1]) continue;
                    double r = std::hypot(xi1 - center[0], xi2 - center[1]);
                    double v = std::abs(at(tables[a1][a2], xi1, xi2));
                    best = std::max(best, std::pow(r, order) * v);
                }
            }
            report.entries.push_back({a1, a2, best});
            omax = std::max(omax, best);
        }
        report.order_max[order] = omax;
    }
    return report;
}

void write_symbol_csv(const symbol2d& m, std::ostream& out) {
    out << "xi1,xi2,re,im\n";
    char buf[96];
    for (int xi1 = -m.n / 2; xi1 < m.n / 2; ++xi1) {
        for (int xi2 = -m.n / 2; xi2 < m.n / 2; ++xi2) {
            const cplx& v = m.at(xi1, xi2);
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", xi1, xi2, v.real(), v.imag());
            out << buf;
        }
    }
}

}  // namespace tfa
