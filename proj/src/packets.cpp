#include "tfa/packets.hpp"

#include <algorithm>
#include <cmath>

namespace tfa {

namespace {

// exp(-s/(1-t^2)) on |t| < 1; family index selects the transition sharpness
double mother_bump(double t, int family) {
    static const double sharpness[packet_family_count] = {1.0, 0.6, 0.35, 0.2};
    require(family >= 0 && family < packet_family_count, "unknown packet family");
    double t2 = t * t;
    if (t2 >= 1.0) return 0.0;
    return std::exp(-sharpness[family] / (1.0 - t2));
}

double torus_distance(double x, double y) {
    double d = std::abs(x - y);
    return std::min(d, 1.0 - d);
}

}  // namespace

wave_packet make_wave_packet(int n, const tile& p, int family) {
    check_grid_size(n);
    if (p.freq.length() < rat(min_packet_width)) fail("tile frequency width below resolution");
    require(rat(-n / 2) <= p.freq.lo && p.freq.hi <= rat(n / 2),
            "tile frequency interval not representable on this grid");

    wave_packet out;
    out.on = p;
    out.family = family;
    out.coeffs = spectrum(n);

    const double center = p.freq.center().to_double();
    const double half = 0.45 * p.freq.length().to_double();  // (9/10) omega half-width
    for (int xi = -n / 2; xi < n / 2; ++xi) {
        double t = (double(xi) - center) / half;
        out.coeffs.at(xi) = mother_bump(t, family);
    }

    // Phase to center at x_I, computed in exact arithmetic so that packets on
    // translated tiles are exact translates of one another.
    grid_function values(n);
    rat xi_center = p.time.center();
    for (int k = 0; k < n; ++k) {
        rat delta = rat(k, n) - xi_center;
        cplx acc(0.0);
        for (int xi = -n / 2; xi < n / 2; ++xi) {
            double b = out.coeffs.at(xi).real();
            if (b != 0.0) acc += b * unit_phase(double(xi) * delta.to_double());
        }
        values[k] = acc;
    }
    double nrm = norm_l2(values);
    require(nrm > 0.0, "degenerate packet");
    for (int k = 0; k < n; ++k) values[k] /= nrm;
    out.values = values;
    // keep the stored spectrum consistent with the normalized samples
    out.coeffs = forward_transform(out.values);
    return out;
}

double verify_decay(const wave_packet& packet, int order) {
    require(order >= 0 && order <= 5, "decay order must be 0..5");
    const int n = packet.values.n;
    const double xc = packet.on.time.center().to_double();
    const double len = packet.on.time.length().to_double();
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        double d = torus_distance(double(k) / n, xc) / len;
        double chi = 1.0 / std::sqrt(1.0 + d * d);
        double v = std::abs(packet.values[k]) * std::sqrt(len) / std::pow(chi, order);
        worst = std::max(worst, v);
    }
    return worst;
}

double spectrum_mass_outside(const wave_packet& packet) {
    const spectrum& s = packet.coeffs;
    interval support = packet.on.freq.dilate(rat(9, 10));
    double inside = 0.0, outside = 0.0;
    for (int xi = -s.n / 2; xi < s.n / 2; ++xi) {
        double m = std::norm(s.at(xi));
        if (support.contains(rat(xi))) inside += m;
        else outside += m;
    }
    if (inside + outside == 0.0) return 0.0;
    return outside / (inside + outside);
}

coefficient_sequence coefficients(const grid_function& f, const std::vector<tri_tile>& tiles,
                                  int j, int family) {
    require(j >= 1 && j <= 3, "coefficient component must be 1..3");
    coefficient_sequence seq;
    seq.component = j;
    seq.kind = 'a';
    seq.values.reserve(tiles.size());
    for (const auto& t : tiles) {
        wave_packet p = make_wave_packet(f.n, t.component(j - 1), family);
        seq.values.push_back(inner_product(f, p.values));
    }
    return seq;
}

coefficient_sequence modulated_coefficients(const grid_function& g, const cutoff_function& cut,
                                            const std::vector<bi_tile>& tiles, int family) {
    require(g.n == cut.n, "grid size mismatch");
    coefficient_sequence seq;
    seq.component = 2;
    seq.kind = 'b';
    seq.values.reserve(tiles.size());
    for (const auto& t : tiles) {
        interval w2 = t.half(2).freq;
        grid_function masked(g.n);
        for (int k = 0; k < g.n; ++k) {
            if (w2.contains(rat(cut[k]))) masked[k] = g[k];
        }
        wave_packet p = make_wave_packet(g.n, t.half(1), family);
        seq.values.push_back(inner_product(masked, p.values));
    }
    return seq;
}

// ---- Walsh model ----

namespace {

struct walsh_shape {
    int level = 0;  // |I| = 2^-level
    i64 tpos = 0;
    i64 fpos = 0;   // omega = [fpos 2^level, (fpos+1) 2^level)
};

walsh_shape walsh_shape_of(int n, const tile& p) {
    walsh_shape s;
    rat flen = p.freq.length();
    // frequency length must be a power of two at most n
    int level = 0;
    while (level < 30 && rat_pow2(level) < flen) ++level;
    if (rat_pow2(level) != flen) fail("walsh packet needs a dyadic tile");
    s.level = level;
    rat fpos = p.freq.lo / flen;
    rat tpos = p.time.lo / p.time.length();
    if (fpos.den != 1 || tpos.den != 1) fail("walsh packet needs an unshifted dyadic tile");
    if (p.time.length() * flen != rat(1)) fail("walsh packet needs an area-1 tile");
    s.fpos = fpos.num;
    s.tpos = tpos.num;
    if (s.fpos < 0 || p.freq.hi > rat(n)) fail("walsh frequencies must lie in [0, n)");
    require((i64(1) << level) <= n, "walsh tile too fine for the grid");
    return s;
}

// wal_q(i/m) for m = 2^L: pair bit j of q with bit L-1-j of i.
int walsh_sign(i64 q, i64 i, int L) {
    int parity = 0;
    for (int j = 0; j < L; ++j) {
        if ((q >> j) & 1) parity ^= int((i >> (L - 1 - j)) & 1);
    }
    return parity ? -1 : 1;
}

}  // namespace

grid_function walsh_packet(int n, const tile& p) {
    check_grid_size(n);
    walsh_shape s = walsh_shape_of(n, p);
    const i64 m = i64(n) >> s.level;  // points inside I
    require(m >= 1, "walsh tile too fine for the grid");
    int L = 0;
    while ((i64(1) << L) < m) ++L;
    grid_function out(n);
    double amp = std::sqrt(double(i64(1) << s.level));  // |I|^{-1/2}
    for (i64 i = 0; i < m; ++i) {
        i64 k = s.tpos * m + i;
        require(k >= 0 && k < n, "walsh tile outside the torus");
        out[int(k)] = amp * walsh_sign(s.fpos, i, L);
    }
    return out;
}

i64 walsh_signed_count(int n, const tile& a, const tile& b) {
    walsh_shape sa = walsh_shape_of(n, a);
    walsh_shape sb = walsh_shape_of(n, b);
    const i64 ma = i64(n) >> sa.level, mb = i64(n) >> sb.level;
    int La = 0, Lb = 0;
    while ((i64(1) << La) < ma) ++La;
    while ((i64(1) << Lb) < mb) ++Lb;
    i64 count = 0;
    i64 lo = std::max(sa.tpos * ma, sb.tpos * mb);
    i64 hi = std::min((sa.tpos + 1) * ma, (sb.tpos + 1) * mb);
    for (i64 k = lo; k < hi; ++k) {
        int pa = walsh_sign(sa.fpos, k - sa.tpos * ma, La);
        int pb = walsh_sign(sb.fpos, k - sb.tpos * mb, Lb);
        count += pa * pb;
    }
    return count;
}

bool walsh_spectrum_matches(int n, const tile& p) {
    walsh_shape s = walsh_shape_of(n, p);
    const i64 m = i64(n) >> s.level;
    int L = 0, Lm = 0;
    while ((1 << L) < n) ++L;
    while ((i64(1) << Lm) < m) ++Lm;
    // integer sign pattern of the packet, bit-reversed for the Paley order
    std::vector<i64> a(n, 0);
    for (i64 i = 0; i < m; ++i) {
        i64 k = s.tpos * m + i;
        int r = 0;
        for (int j = 0; j < L; ++j) {
            if ((k >> j) & 1) r |= 1 << (L - 1 - j);
        }
        a[r] = walsh_sign(s.fpos, i, Lm);
    }
    for (int len = 1; len < n; len <<= 1) {
        for (int i = 0; i < n; i += 2 * len) {
            for (int j = 0; j < len; ++j) {
                i64 u = a[i + j], v = a[i + j + len];
                a[i + j] = u + v;
                a[i + j + len] = u - v;
            }
        }
    }
    interval w = p.freq;
    for (int h = 0; h < n; ++h) {
        bool inside = w.contains(rat(h));
        if (!inside && a[h] != 0) return false;
        if (inside && a[h] == 0) return false;  // full support on omega as well
    }
    return true;
}

std::vector<cplx> walsh_transform(const grid_function& f) {
    const int n = f.n;
    int L = 0;
    while ((1 << L) < n) ++L;
    // wal_h(k/n) = (-1)^{<h, reverse(k)>}: bit-reverse, then fast Hadamard
    std::vector<cplx> a(n);
    for (int k = 0; k < n; ++k) {
        int r = 0;
        for (int j = 0; j < L; ++j) {
            if ((k >> j) & 1) r |= 1 << (L - 1 - j);
        }
        a[r] = f[k];
    }
    for (int len = 1; len < n; len <<= 1) {
        for (int i = 0; i < n; i += 2 * len) {
            for (int j = 0; j < len; ++j) {
                cplx u = a[i + j], v = a[i + j + len];
                a[i + j] = u + v;
                a[i + j + len] = u - v;
            }
        }
    }
    for (auto& z : a) z /= double(n);
    return a;
}

}  // namespace tfa
