#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "tfa/packets.hpp"

using namespace tfa;
using namespace tfa::testing;

namespace {

tile freq_tile(int w, i64 fpos, i64 tpos) {
    // omega = [fpos*w, (fpos+1)*w), I the tpos-th interval of length 1/w
    rat len(1, w);
    return tile{interval(rat(tpos) * len, rat(tpos + 1) * len),
                interval(rat(fpos * w), rat((fpos + 1) * w))};
}

}  // namespace

TEST_CASE("packets are L2-normalized and spectrally confined") {
    const int n = 256;
    for (int family = 0; family < packet_family_count; ++family) {
        wave_packet p = make_wave_packet(n, freq_tile(32, 0, 3), family);
        CHECK(std::abs(inner_product(p.values, p.values) - cplx(1.0)) < 1e-10);
        CHECK(spectrum_mass_outside(p) < 1e-10);
    }
}

TEST_CASE("tiles below the resolution floor are rejected") {
    CHECK_THROWS(make_wave_packet(64, freq_tile(4, 0, 0)));
    // frequency interval outside the representable range
    CHECK_THROWS(make_wave_packet(64, freq_tile(32, 4, 0)));
}

TEST_CASE("same-scale packets are translates of each other") {
    const int n = 256;
    const int w = 32;
    wave_packet a = make_wave_packet(n, freq_tile(w, 0, 2));
    wave_packet b = make_wave_packet(n, freq_tile(w, 0, 7));
    const int shift = (7 - 2) * (n / w);
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        worst = std::max(worst, std::abs(b.values[(k + shift) % n] - a.values[k]));
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("packets with disjoint nine-tenths supports are orthogonal") {
    const int n = 256;
    wave_packet a = make_wave_packet(n, freq_tile(32, 0, 0));
    wave_packet b = make_wave_packet(n, freq_tile(32, 1, 5));
    wave_packet c = make_wave_packet(n, freq_tile(32, -2, 9));
    CHECK(std::abs(inner_product(a.values, b.values)) < 1e-10);
    CHECK(std::abs(inner_product(a.values, c.values)) < 1e-10);
    CHECK(std::abs(inner_product(b.values, c.values)) < 1e-10);
}

TEST_CASE("decay constants are finite, monotone in the order, and scale-stable") {
    // three frequency widths on one large grid; the measured constants per
    // order must agree within 5% across scales
    const int n = 1024;
    std::vector<std::vector<double>> cm;
    for (int w : {64, 128, 256}) {
        wave_packet p = make_wave_packet(n, freq_tile(w, 0, 0));
        std::vector<double> row;
        for (int order = 0; order <= 5; ++order) row.push_back(verify_decay(p, order));
        cm.push_back(row);
    }
    for (const auto& row : cm) {
        CHECK(row[0] <= 1.0);  // normalized packet peaks below |I|^{-1/2}
        for (int order = 1; order <= 5; ++order) CHECK(row[order - 1] <= row[order] * (1 + 1e-12));
        for (double v : row) CHECK(std::isfinite(v));
    }
    for (int order = 0; order <= 5; ++order) {
        double lo = cm[0][order], hi = cm[0][order];
        for (const auto& row : cm) {
            lo = std::min(lo, row[order]);
            hi = std::max(hi, row[order]);
        }
        CHECK(hi / lo <= 1.05);
    }
}

TEST_CASE("coefficient sequences reproduce packets and vanish on zero input") {
    const int n = 256;
    // tri-tiles over one scale-5 cube battery: frequency sides of width 32
    std::vector<tri_tile> tiles;
    shifted_cube q1;
    q1.dim = 3;
    q1.scale = 5;
    q1.pos = {0, -2, 1};
    tiles.push_back(make_tri_tile(q1, 3));
    shifted_cube q2 = q1;
    q2.pos = {-4, 1, -1};  // first component [-128,-96): disjoint from [0,32)
    tiles.push_back(make_tri_tile(q2, 9));

    wave_packet p = make_wave_packet(n, tiles[0].component(0));
    coefficient_sequence seq = coefficients(p.values, tiles, 1);
    REQUIRE(seq.values.size() == 2);
    CHECK(std::abs(seq.values[0] - cplx(1.0)) < 1e-10);
    CHECK(std::abs(seq.values[1]) < 1e-10);

    grid_function zero(n);
    coefficient_sequence zs = coefficients(zero, tiles, 2);
    for (const auto& v : zs.values) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("disjoint-tile coefficient energy stays within a tenth of the input energy") {
    const int n = 256;
    // fixture: three frequency-disjoint bands; inside each band, same-omega
    // tiles spaced four spatial lengths apart
    std::vector<tile> tiles;
    for (i64 fpos : {-3, 0, 2}) {
        for (i64 tpos = 0; tpos < 32; tpos += 4) tiles.push_back(freq_tile(32, fpos, tpos));
    }
    std::vector<wave_packet> packets;
    for (const auto& t : tiles) packets.push_back(make_wave_packet(n, t));

    // Gram bound first: max row sum of |<phi_P, phi_Q>| stays below 1.1
    double row_bound = 0.0;
    for (const auto& a : packets) {
        double row = 0.0;
        for (const auto& b : packets) row += std::abs(inner_product(a.values, b.values));
        row_bound = std::max(row_bound, row);
    }
    CHECK(row_bound <= 1.1);

    for (int trial = 0; trial < 5; ++trial) {
        rng_stream rng(900 + trial, 0);
        grid_function f = random_function(n, rng);
        double energy = 0.0;
        for (const auto& p : packets) energy += std::norm(inner_product(f, p.values));
        double total = norm_l2(f);
        CHECK(energy <= 1.1 * total * total);
    }
}

TEST_CASE("modulated coefficients apply the exact cutoff indicator") {
    const int n = 64;
    bi_tile p = make_bi_tile(rat(1), rat(0), 5, 0, 3);  // omega = [0,32), halves width 16
    std::vector<bi_tile> tiles = {p};
    rng_stream rng(42, 1);
    grid_function g = random_function(n, rng);

    // cutoff never inside the right half [16,32)
    cutoff_function none(n, 0);
    CHECK(std::abs(modulated_coefficients(g, none, tiles).values[0]) == 0.0);

    // cutoff constant inside: the mask is the identity
    cutoff_function all(n, 20);
    wave_packet left = make_wave_packet(n, p.half(1));
    cplx want = inner_product(g, left.values);
    CHECK(std::abs(modulated_coefficients(g, all, tiles).values[0] - want) < 1e-12);

    // random cutoff against an independent masked loop
    cutoff_function mixed(n, 0);
    for (int k = 0; k < n; ++k) mixed[k] = int(rng.next_in(-32, 32));
    cplx got = modulated_coefficients(g, mixed, tiles).values[0];
    cplx direct(0.0);
    for (int k = 0; k < n; ++k) {
        if (mixed[k] >= 16 && mixed[k] < 32) direct += g[k] * std::conj(left.values[k]);
    }
    direct /= double(n);
    CHECK(std::abs(got - direct) < 1e-12);
}

TEST_CASE("walsh packet on the full tile is the constant function") {
    tile full{interval(rat(0), rat(1)), interval(rat(0), rat(1))};
    grid_function w = walsh_packet(32, full);
    for (int k = 0; k < 32; ++k) CHECK(w[k] == cplx(1.0));
}

TEST_CASE("walsh packets reject shifted or non-dyadic tiles") {
    tile shifted{interval(rat(1, 3), rat(4, 3)), interval(rat(0), rat(1))};
    CHECK_THROWS(walsh_packet(32, shifted));
    tile wrong_area{interval(rat(0), rat(1, 2)), interval(rat(0), rat(1))};
    CHECK_THROWS(walsh_packet(32, wrong_area));
    tile negative{interval(rat(0), rat(1)), interval(rat(-1), rat(0))};
    CHECK_THROWS(walsh_packet(32, negative));
}

TEST_CASE("walsh inner products match the hand-computed 8-point table") {
    // A = [0,1) x [2,3), B = [0,1/2) x [2,4): signs agree on all four common
    // points, so the signed count is 4 and the inner product is sqrt(2)/2
    tile a{interval(rat(0), rat(1)), interval(rat(2), rat(3))};
    tile b{interval(rat(0), rat(1, 2)), interval(rat(2), rat(4))};
    CHECK(walsh_signed_count(8, a, b) == 4);
    grid_function wa = walsh_packet(8, a), wb = walsh_packet(8, b);
    CHECK(std::abs(inner_product(wa, wb) - cplx(std::sqrt(2.0) / 2.0)) < 1e-12);

    // same spatial nesting, frequency-disjoint: exactly orthogonal
    tile c{interval(rat(0), rat(1)), interval(rat(4), rat(5))};
    CHECK(walsh_signed_count(8, c, b) == 0);
}

TEST_CASE("walsh packets on disjoint rectangles are exactly orthogonal, grid 32") {
    const int n = 32;
    std::vector<tile> tiles;
    for (int level = 0; (1 << level) <= n; ++level) {
        i64 w = i64(1) << level;
        for (i64 tpos = 0; tpos < w; ++tpos) {
            for (i64 fpos = 0; fpos * w < n; ++fpos) {
                tiles.push_back(tile{interval(rat(tpos, w), rat(tpos + 1, w)),
                                     interval(rat(fpos * w), rat((fpos + 1) * w))});
            }
        }
    }
    int disjoint_pairs = 0, overlapping_pairs = 0;
    for (size_t i = 0; i < tiles.size(); ++i) {
        for (size_t j = i + 1; j < tiles.size(); ++j) {
            bool overlap = tiles[i].time.intersects(tiles[j].time) &&
                           tiles[i].freq.intersects(tiles[j].freq);
            i64 count = walsh_signed_count(n, tiles[i], tiles[j]);
            if (!overlap) {
                ++disjoint_pairs;
                CHECK(count == 0);
            } else {
                ++overlapping_pairs;
            }
            // nonzero products require spatial nesting
            if (count != 0) {
                bool nested = tiles[i].time.contains(tiles[j].time) ||
                              tiles[j].time.contains(tiles[i].time);
                CHECK(nested);
            }
        }
    }
    CHECK(disjoint_pairs > 10000);
    CHECK(overlapping_pairs > 100);
}

TEST_CASE("walsh spectra occupy exactly the tile frequency interval") {
    for (auto [level, tpos, fpos] : std::vector<std::array<i64, 3>>{
             {0, 0, 5}, {1, 1, 3}, {2, 2, 1}, {3, 5, 0}, {4, 9, 1}}) {
        i64 w = i64(1) << level;
        tile t{interval(rat(tpos, w), rat(tpos + 1, w)),
               interval(rat(fpos * w), rat((fpos + 1) * w))};
        CHECK(walsh_spectrum_matches(32, t));
    }
}

TEST_CASE("floating walsh transform agrees with the definition") {
    const int n = 16;
    rng_stream rng(5, 5);
    grid_function f = random_function(n, rng);
    auto c = walsh_transform(f);
    // direct evaluation from the sign definition
    for (int h = 0; h < n; ++h) {
        cplx acc(0.0);
        for (int k = 0; k < n; ++k) {
            int parity = 0;
            for (int j = 0; j < 4; ++j) {
                if ((h >> j) & 1) parity ^= (k >> (3 - j)) & 1;
            }
            acc += f[k] * double(parity ? -1 : 1);
        }
        CHECK(std::abs(c[h] - acc / double(n)) < 1e-12);
    }
}
