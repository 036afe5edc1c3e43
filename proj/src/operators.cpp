#include "rnsa/operators.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

#include "rnsa/errors.hpp"
#include "rnsa/random_field.hpp"

namespace rnsa {

void stokes_apply(SpectralField& u) {
    for (const Mode& m : u.lat->modes())
        for (int c = 0; c < 3; ++c) u.c[c][m.idx] *= m.s;
}

SpectralField stokes_applied(const SpectralField& u) {
    SpectralField r = u;
    stokes_apply(r);
    return r;
}

void helmholtz_inverse(SpectralField& u, AlphaParam ap) {
    const double a2 = ap.alpha * ap.alpha;
    for (const Mode& m : u.lat->modes()) {
        const double f = 1.0 / (1.0 + a2 * m.s);
        for (int c = 0; c < 3; ++c) u.c[c][m.idx] *= f;
    }
}

SpectralField helmholtz_inverted(const SpectralField& u, AlphaParam ap) {
    SpectralField r = u;
    helmholtz_inverse(r, ap);
    return r;
}

SpectralField coriolis_apply(const SpectralField& u, CoriolisParam cp, AlphaParam ap,
                             bool filter_argument) {
    SpectralField r(u.lat);
    const double a2 = ap.alpha * ap.alpha;
    for (const Mode& m : u.lat->modes()) {
        if (m.s == 0.0) continue;
        const double g = cp.f * (filter_argument ? 1.0 / (1.0 + a2 * m.s) : 1.0);
        // w = J u with J = [[0,-1,0],[1,0,0],[0,0,0]]; the input is already
        // tangential so the inner projection is a no-op
        cplx w0 = -u.c[1][m.idx] * g;
        cplx w1 = u.c[0][m.idx] * g;
        cplx w2 = cplx(0.0, 0.0);
        const cplx d = (m.nch[0] * w0 + m.nch[1] * w1 + m.nch[2] * w2) / m.s;
        r.c[0][m.idx] = w0 - m.nch[0] * d;
        r.c[1][m.idx] = w1 - m.nch[1] * d;
        r.c[2][m.idx] = w2 - m.nch[2] * d;
    }
    return r;
}

SpectralField bilinear(FftWorkspace& ws, const SpectralField& u, const SpectralField& v,
                       AlphaParam ap) {
    if (u.lat.get() != v.lat.get()) throw Error("bilinear arguments on different lattices");
    const LatticePtr& lat = u.lat;

    SpectralField filt = helmholtz_inverted(u, ap);
    PhysicalField w(lat);
    ws.to_physical(filt, w);

    // curl v in spectral space: (i nch x v)
    SpectralField curl(lat);
    for (const Mode& m : lat->modes()) {
        const cplx v0 = v.c[0][m.idx], v1 = v.c[1][m.idx], v2 = v.c[2][m.idx];
        const cplx i(0.0, 1.0);
        curl.c[0][m.idx] = i * (m.nch[1] * v2 - m.nch[2] * v1);
        curl.c[1][m.idx] = i * (m.nch[2] * v0 - m.nch[0] * v2);
        curl.c[2][m.idx] = i * (m.nch[0] * v1 - m.nch[1] * v0);
    }
    PhysicalField om(lat);
    ws.to_physical(curl, om);

    PhysicalField prod(lat);
    const std::size_t np = lat->points();
    for (std::size_t i = 0; i < np; ++i) {
        const double w0 = w.g[0][i], w1 = w.g[1][i], w2 = w.g[2][i];
        const double o0 = om.g[0][i], o1 = om.g[1][i], o2 = om.g[2][i];
        prod.g[0][i] = o1 * w2 - o2 * w1;
        prod.g[1][i] = o2 * w0 - o0 * w2;
        prod.g[2][i] = o0 * w1 - o1 * w0;
    }

    SpectralField out(lat);
    ws.to_spectral(prod, out);
    apply_dealias_mask(out);
    leray_project(out);
    hermitian_symmetrize(out);
    return out;
}

SpectralField bilinear_oracle(const SpectralField& u, const SpectralField& v,
                              AlphaParam ap, std::size_t mode_guard) {
    if (u.lat.get() != v.lat.get()) throw Error("bilinear arguments on different lattices");
    const LatticePtr& lat = u.lat;
    const auto& modes = lat->modes();
    if (modes.size() > mode_guard) {
        std::ostringstream os;
        os << "bilinear_oracle guard: " << modes.size() << " retained modes exceed "
           << mode_guard << "; the direct convolution is quadratic in that count";
        throw Error(os.str());
    }

    SpectralField filt = helmholtz_inverted(u, ap);

    // retained-mode lookup by integer wave index
    auto key = [](int n1, int n2, int n3) {
        return (static_cast<std::int64_t>(n1 + 512) << 20) |
               (static_cast<std::int64_t>(n2 + 512) << 10) |
               static_cast<std::int64_t>(n3 + 512);
    };
    std::unordered_map<std::int64_t, const Mode*> by_wave;
    by_wave.reserve(modes.size());
    for (const Mode& m : modes) by_wave.emplace(key(m.n[0], m.n[1], m.n[2]), &m);

    SpectralField out(lat);
    const cplx iu(0.0, 1.0);
    for (const Mode& mn : modes) {
        if (mn.s == 0.0) continue;
        cplx acc[3] = {};
        for (const Mode& mk : modes) {
            const auto it = by_wave.find(key(mn.n[0] - mk.n[0], mn.n[1] - mk.n[1],
                                             mn.n[2] - mk.n[2]));
            if (it == by_wave.end()) continue;
            const Mode& mm = *it->second;
            const cplx wk[3] = {filt.c[0][mk.idx], filt.c[1][mk.idx], filt.c[2][mk.idx]};
            const cplx vk[3] = {v.c[0][mk.idx], v.c[1][mk.idx], v.c[2][mk.idx]};
            const cplx wm[3] = {filt.c[0][mm.idx], filt.c[1][mm.idx], filt.c[2][mm.idx]};
            const cplx vm[3] = {v.c[0][mm.idx], v.c[1][mm.idx], v.c[2][mm.idx]};
            // (R_alpha u . grad)v picks w at k, v at m; v_j grad(R_alpha u)_j
            // picks v at k, R_alpha u at m
            const cplx adv = wk[0] * mm.nch[0] + wk[1] * mm.nch[1] + wk[2] * mm.nch[2];
            const cplx dot = vk[0] * wm[0] + vk[1] * wm[1] + vk[2] * wm[2];
            for (int c = 0; c < 3; ++c) acc[c] += adv * vm[c] + dot * mm.nch[c];
        }
        for (int c = 0; c < 3; ++c) out.c[c][mn.idx] = iu * acc[c];
    }
    leray_project(out);
    hermitian_symmetrize(out);
    return out;
}

std::vector<EigenvalueShell> stokes_eigenvalues(const Lattice& lat, std::size_t max_count) {
    std::vector<EigenvalueShell> out;
    for (const Shell& sh : lat.shells()) {
        out.push_back({sh.lambda, sh.dof, sh.cum_dof});
        if (max_count && out.size() >= max_count) break;
    }
    return out;
}

ProjectionSplit spectral_projection(const SpectralField& u, long n0) {
    if (n0 < 0) throw Error("spectral_projection rank must be nonnegative");
    const auto& shells = u.lat->shells();
    ProjectionSplit ps{SpectralField(u.lat), u, n0, 0, 0.0};
    std::size_t si = 0;
    for (; si < shells.size(); ++si) {
        if (ps.effective_rank >= n0) break;
        for (std::size_t idx : shells[si].mode_idx)
            for (int c = 0; c < 3; ++c) {
                ps.low.c[c][idx] = u.c[c][idx];
                ps.high.c[c][idx] = cplx(0.0, 0.0);
            }
        ps.effective_rank = shells[si].cum_dof;
    }
    ps.lambda_next = si < shells.size() ? shells[si].lambda : 0.0;
    return ps;
}

BilinearConstants estimate_bilinear_constants(FftWorkspace& ws, double s, AlphaParam ap,
                                              int samples, std::uint64_t seed) {
    const LatticePtr& lat = ws.lattice();
    double kmax = 0.0;
    for (const Shell& sh : lat->shells()) kmax = std::max(kmax, sh.lambda);
    SpectrumProfile prof;
    prof.k_min = 0.0;
    prof.k_max = 0.5 * std::sqrt(kmax);   // flat energy up to half the dealias cutoff
    prof.amplitude = 1.0;

    BilinearConstants bc;
    bc.samples = samples;
    for (int i = 0; i < samples; ++i) {
        SpectralField vf = random_divfree_field(lat, derive_seed(seed, 2 * i), prof);
        SpectralField wf = random_divfree_field(lat, derive_seed(seed, 2 * i + 1), prof);
        const double vs = sobolev_norm(vf, s);
        const double ws_ = sobolev_norm(wf, s);
        const double ws1 = sobolev_norm(wf, s + 1.0);
        if (vs == 0.0 || ws_ == 0.0 || ws1 == 0.0) {
            ++bc.skipped;
            continue;
        }
        SpectralField b = bilinear(ws, vf, wf, ap);
        const double bs = sobolev_norm(b, s);
        const double pairing = std::abs(inner_product(b, wf, s));
        bc.c_emp = std::max(bc.c_emp, bs / (vs * ws1));
        bc.d_emp = std::max(bc.d_emp, pairing / (vs * ws_ * ws_));
        bc.d_emp_variant = std::max(bc.d_emp_variant, pairing / (vs * ws_ * ws1));
    }
    return bc;
}

} // namespace rnsa
