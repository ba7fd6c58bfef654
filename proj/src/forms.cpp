#include "tfa/forms.hpp"

#include <cmath>
#include <string>

#include "tfa/packets.hpp"

namespace tfa {

namespace {

void check_family(int family) {
    require(family >= 0 && family < packet_family_count, "unknown packet family");
}

void check_families(const family_choice& fam) {
    check_family(fam.outer);
    check_family(fam.outer_alt);
    check_family(fam.inner);
    check_family(fam.inner_alt);
}

void check_one_grid(const std::vector<bi_tile>& ps) {
    for (size_t i = 1; i < ps.size(); ++i) {
        require(ps[i].same_grid(ps[0]), "bi-tile collection must live on one frequency grid");
    }
}

void check_cutoff(const grid_function& f, const cutoff_function& cut) {
    require(f.n == cut.n, "grid size mismatch");
    cut.validate();
}

// chi_{x : cutoff(x) in om} f, pointwise
grid_function masked(const grid_function& f, const cutoff_function& cut, const interval& om) {
    grid_function g(f.n);
    for (int k = 0; k < f.n; ++k) {
        if (om.contains(rat(cut[k]))) g[k] = f[k];
    }
    return g;
}

// Fixed-shape reduction: the sum is split in halves recursively, so the
// result does not depend on how a caller might batch the terms.
cplx pairwise_sum(const std::vector<cplx>& terms, size_t lo, size_t hi) {
    if (hi - lo <= 4) {
        cplx s = 0.0;
        for (size_t i = lo; i < hi; ++i) s += terms[i];
        return s;
    }
    size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(terms, lo, mid) + pairwise_sum(terms, mid, hi);
}

cplx pairwise_sum(const std::vector<cplx>& terms) { return pairwise_sum(terms, 0, terms.size()); }

void check_rank1_pre(const std::vector<tri_tile>& qs) {
    pair_witness w = check_rank1(qs, rank1_config{});
    require(w.ok, "tri-tile collection is not rank 1 (tiles " + std::to_string(w.a) + " and " +
                      std::to_string(w.b) + ": " + w.note + ")");
}

double inv_sqrt_time(const tri_tile& q) { return 1.0 / std::sqrt(q.time.length().to_double()); }

}  // namespace

tile reflect_freq(const tile& t) {
    return tile{t.time, interval(rat(0) - t.freq.hi, rat(0) - t.freq.lo)};
}

grid_function b_inner(const tile& p1, const std::vector<tri_tile>& qs, const grid_function& f1,
                      const grid_function& f2, int family) {
    require(f1.n == f2.n, "grid size mismatch");
    check_family(family);
    grid_function out(f1.n);
    for (const auto& q : qs) {
        if (!p1.freq.contains(q.component(2).freq)) continue;
        wave_packet q1 = make_wave_packet(out.n, q.component(0), family);
        wave_packet q2 = make_wave_packet(out.n, q.component(1), family);
        wave_packet q3 = make_wave_packet(out.n, q.component(2), family);
        cplx coef =
            inv_sqrt_time(q) * inner_product(f1, q1.values) * inner_product(f2, q2.values);
        for (int k = 0; k < out.n; ++k) out[k] += coef * q3.values[k];
    }
    return out;
}

cplx lambda_prime(const std::vector<bi_tile>& ps, const std::vector<tri_tile>& qs,
                  const grid_function& f1, const grid_function& f2, const grid_function& f3,
                  const cutoff_function& cut, const family_choice& fam) {
    require(f1.n == f2.n && f1.n == f3.n, "grid size mismatch");
    check_cutoff(f1, cut);
    check_families(fam);
    check_one_grid(ps);
    check_rank1_pre(qs);
    std::vector<cplx> terms;
    terms.reserve(ps.size());
    for (const auto& p : ps) {
        tile p1 = p.half(1);
        grid_function b = b_inner(p1, qs, f1, f2, fam.inner);
        wave_packet outer = make_wave_packet(f1.n, p1, fam.outer);
        wave_packet alt = make_wave_packet(f1.n, p1, fam.outer_alt);
        terms.push_back(inner_product(b, outer.values) *
                        inner_product(masked(alt.values, cut, p.half(2).freq), f3));
    }
    return pairwise_sum(terms);
}

std::vector<cplx> adjoint_coefficients(const std::vector<tri_tile>& qs,
                                       const std::vector<bi_tile>& ps, const grid_function& f3,
                                       const cutoff_function& cut, const family_choice& fam) {
    check_cutoff(f3, cut);
    check_families(fam);
    check_one_grid(ps);
    std::vector<cplx> out;
    out.reserve(qs.size());
    for (const auto& q : qs) {
        wave_packet q3 = make_wave_packet(f3.n, q.component(2), fam.inner);
        cplx a3 = 0.0;
        for (const auto& p : ps) {
            tile p1 = p.half(1);
            if (!p1.freq.contains(q.component(2).freq)) continue;
            wave_packet outer = make_wave_packet(f3.n, p1, fam.outer);
            wave_packet alt = make_wave_packet(f3.n, p1, fam.outer_alt);
            a3 += inner_product(q3.values, outer.values) *
                  inner_product(masked(alt.values, cut, p.half(2).freq), f3);
        }
        out.push_back(a3);
    }
    return out;
}

cplx lambda_prime_reversed(const std::vector<tri_tile>& qs, const std::vector<bi_tile>& ps,
                           const grid_function& f1, const grid_function& f2,
                           const grid_function& f3, const cutoff_function& cut,
                           const family_choice& fam) {
    require(f1.n == f2.n && f1.n == f3.n, "grid size mismatch");
    check_cutoff(f1, cut);
    check_families(fam);
    check_one_grid(ps);
    check_rank1_pre(qs);
    std::vector<cplx> a3 = adjoint_coefficients(qs, ps, f3, cut, fam);
    std::vector<cplx> terms;
    terms.reserve(qs.size());
    for (std::size_t m = 0; m < qs.size(); ++m) {
        const tri_tile& q = qs[m];
        wave_packet q1 = make_wave_packet(f1.n, q.component(0), fam.inner);
        wave_packet q2 = make_wave_packet(f1.n, q.component(1), fam.inner);
        terms.push_back(inv_sqrt_time(q) * inner_product(f1, q1.values) *
                        inner_product(f2, q2.values) * a3[m]);
    }
    return pairwise_sum(terms);
}

grid_function carleson_adjoint(const std::vector<bi_tile>& ps, const grid_function& f,
                               const cutoff_function& cut, int family) {
    check_cutoff(f, cut);
    check_family(family);
    check_one_grid(ps);
    grid_function out(f.n);
    for (const auto& p : ps) {
        wave_packet w = make_wave_packet(f.n, p.half(1), family);
        cplx coef = inner_product(masked(f, cut, p.half(2).freq), w.values);
        for (int k = 0; k < out.n; ++k) out[k] += coef * w.values[k];
    }
    return out;
}

decouple_result decouple_check(const std::vector<tri_tile>& tree, const std::vector<bi_tile>& ps,
                               const grid_function& f, const cutoff_function& cut, double tol,
                               const family_choice& fam, bool enforce_sparse) {
    check_cutoff(f, cut);
    check_families(fam);
    check_one_grid(ps);
    if (enforce_sparse) {
        std::vector<shifted_cube> cubes;
        cubes.reserve(tree.size());
        for (const auto& q : tree) cubes.push_back(q.freq);
        pair_witness w = is_sparse(cubes, rat(8));
        require(w.ok, "decouple_check: tree is not sparse (cubes " + std::to_string(w.a) +
                          " and " + std::to_string(w.b) + ": " + w.note + ")");
    }
    auto linked = [&](const bi_tile& p, const tri_tile& q) {
        return p.half(1).freq.contains(q.component(2).freq);
    };
    std::vector<bi_tile> all_linked;
    for (const auto& p : ps) {
        for (const auto& q : tree) {
            if (linked(p, q)) {
                all_linked.push_back(p);
                break;
            }
        }
    }
    grid_function full = carleson_adjoint(all_linked, f, cut, fam.outer);
    decouple_result res;
    res.residues.reserve(tree.size());
    for (size_t qi = 0; qi < tree.size(); ++qi) {
        std::vector<bi_tile> own;
        for (const auto& p : ps) {
            if (linked(p, tree[qi])) own.push_back(p);
        }
        grid_function part = carleson_adjoint(own, f, cut, fam.outer);
        wave_packet q3 = make_wave_packet(f.n, tree[qi].component(2), fam.inner);
        double r = std::abs(inner_product(full, q3.values) - inner_product(part, q3.values));
        res.residues.push_back(r);
        if (r > res.residue) {
            res.residue = r;
            if (r > tol) res.offender = int(qi);
        }
    }
    res.ok = res.residue <= tol;
    return res;
}

cplx lambda_doubleprime(const std::vector<bi_tile>& ps, const std::vector<bi_tile>& qs,
                        const grid_function& f1, const grid_function& f2, const grid_function& f3,
                        const cutoff_function& cut, const family_choice& fam) {
    require(f1.n == f2.n && f1.n == f3.n, "grid size mismatch");
    check_cutoff(f1, cut);
    check_families(fam);
    check_one_grid(ps);
    check_one_grid(qs);
    std::vector<cplx> terms;
    terms.reserve(ps.size());
    for (const auto& p : ps) {
        interval wp2 = p.half(2).freq;
        grid_function carl(f1.n);
        bool any = false;
        for (const auto& q : qs) {
            interval wq2 = q.half(2).freq;
            if (!(wq2.length() < wp2.length()) || !wq2.intersects(wp2)) continue;
            wave_packet qc = make_wave_packet(f1.n, q.half(1), fam.inner);
            wave_packet qf = make_wave_packet(f1.n, q.half(1), fam.inner_alt);
            cplx coef = inner_product(f2, qc.values);
            grid_function piece = masked(qf.values, cut, wq2);
            for (int k = 0; k < carl.n; ++k) carl[k] += coef * piece[k];
            any = true;
        }
        if (!any) {
            terms.push_back(0.0);
            continue;
        }
        wave_packet outer = make_wave_packet(f1.n, p.half(1), fam.outer);
        wave_packet alt = make_wave_packet(f1.n, p.half(1), fam.outer_alt);
        grid_function paired(f1.n);
        for (int k = 0; k < paired.n; ++k) paired[k] = alt.values[k] * carl[k];
        terms.push_back(inner_product(f1, outer.values) *
                        inner_product(masked(paired, cut, wp2), f3));
    }
    return pairwise_sum(terms);
}

cplx lambda_doubleprime_rewritten(const std::vector<bi_tile>& qs, const std::vector<bi_tile>& ps,
                                  const grid_function& f1, const grid_function& f2,
                                  const grid_function& f3, const cutoff_function& cut,
                                  const family_choice& fam) {
    require(f1.n == f2.n && f1.n == f3.n, "grid size mismatch");
    check_cutoff(f1, cut);
    check_families(fam);
    check_one_grid(ps);
    check_one_grid(qs);
    std::vector<cplx> terms;
    terms.reserve(qs.size());
    for (const auto& q : qs) {
        interval wq2 = q.half(2).freq;
        grid_function coarse(f1.n);
        bool any = false;
        for (const auto& p : ps) {
            interval wp2 = p.half(2).freq;
            if (!(wq2.length() < wp2.length()) || !wq2.intersects(wp2)) continue;
            wave_packet outer = make_wave_packet(f1.n, p.half(1), fam.outer);
            wave_packet alt = make_wave_packet(f1.n, p.half(1), fam.outer_alt);
            cplx coef = inner_product(f1, outer.values);
            grid_function piece = masked(alt.values, cut, wp2);
            for (int k = 0; k < coarse.n; ++k) coarse[k] += coef * piece[k];
            any = true;
        }
        if (!any) {
            terms.push_back(0.0);
            continue;
        }
        wave_packet qc = make_wave_packet(f1.n, q.half(1), fam.inner);
        wave_packet qf = make_wave_packet(f1.n, q.half(1), fam.inner_alt);
        grid_function paired(f1.n);
        for (int k = 0; k < paired.n; ++k) paired[k] = qf.values[k] * coarse[k];
        terms.push_back(inner_product(f2, qc.values) *
                        inner_product(masked(paired, cut, wq2), f3));
    }
    return pairwise_sum(terms);
}

cplx lambda_carleson(const std::vector<bi_tile>& ps, const grid_function& f1,
                     const grid_function& f2, const cutoff_function& cut, int family) {
    require(f1.n == f2.n, "grid size mismatch");
    check_cutoff(f1, cut);
    check_family(family);
    check_one_grid(ps);
    coefficient_sequence b = modulated_coefficients(f2, cut, ps, family);
    std::vector<cplx> terms;
    terms.reserve(ps.size());
    for (size_t i = 0; i < ps.size(); ++i) {
        wave_packet w = make_wave_packet(f1.n, ps[i].half(1), family);
        terms.push_back(inner_product(f1, w.values) * b.values[i]);
    }
    return pairwise_sum(terms);
}

}  // namespace tfa
