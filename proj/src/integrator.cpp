#include "rnsa/integrator.hpp"

#include <cmath>
#include <sstream>

#include "rnsa/errors.hpp"

namespace rnsa {

SpectralField rhs(FftWorkspace& ws, const SimParams& p, const SpectralField& v) {
    SpectralField r(v.lat);
    if (p.forcing) r = *p.forcing;
    for (const Mode& m : v.lat->modes()) {
        const double visc = p.nu * m.s;
        for (int c = 0; c < 3; ++c) r.c[c][m.idx] -= visc * v.c[c][m.idx];
    }
    if (p.coriolis.f != 0.0) {
        SpectralField cor = coriolis_apply(v, p.coriolis, p.alpha);
        axpy(r, -1.0, cor);
    }
    if (p.nonlinearity_enabled) {
        SpectralField b = bilinear(ws, v, v, p.alpha);
        axpy(r, -1.0, b);
    }
    return r;
}

Stepper::Stepper(LatticePtr lat, SimParams params, StepperConfig cfg)
    : lat_(lat), params_(std::move(params)), cfg_(cfg), ws_(lat) {
    if (!(cfg_.dt > 0.0)) throw Error("step size must be positive");
    if (params_.forcing && params_.forcing->lat.get() != lat_.get())
        throw Error("forcing lives on a different lattice");
}

void Stepper::refresh_factors(double dt) {
    if (dt == cached_dt_) return;
    const std::size_t np = lat_->points();
    e_half_.assign(np, 1.0);
    e_full_.assign(np, 1.0);
    for (const Mode& m : lat_->modes()) {
        e_half_[m.idx] = std::exp(-params_.nu * m.s * (0.5 * dt));
        e_full_[m.idx] = std::exp(-params_.nu * m.s * dt);
    }
    cached_dt_ = dt;
}

SpectralField Stepper::nonlinear_rhs(const SpectralField& v) {
    SpectralField r(lat_);
    if (params_.forcing) r = *params_.forcing;
    if (params_.coriolis.f != 0.0) {
        SpectralField cor = coriolis_apply(v, params_.coriolis, params_.alpha);
        axpy(r, -1.0, cor);
    }
    if (params_.nonlinearity_enabled) {
        SpectralField b = bilinear(ws_, v, v, params_.alpha);
        axpy(r, -1.0, b);
    }
    return r;
}

SpectralField Stepper::tangent_rhs(const SpectralField& v, const SpectralField& z,
                                   bool include_filter) {
    SpectralField r(lat_);
    if (params_.coriolis.f != 0.0) {
        SpectralField cor = coriolis_apply(z, params_.coriolis, params_.alpha, include_filter);
        axpy(r, -1.0, cor);
    }
    if (params_.nonlinearity_enabled) {
        SpectralField bvz = bilinear(ws_, v, z, params_.alpha);
        SpectralField bzv = bilinear(ws_, z, v, params_.alpha);
        axpy(r, -1.0, bvz);
        axpy(r, -1.0, bzv);
    }
    return r;
}

namespace {

SpectralField combined(const SpectralField& base, double h, const SpectralField& k,
                       const std::vector<double>& table) {
    // table .* (base + h k)
    SpectralField r(base.lat);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < r.c[c].size(); ++i)
            r.c[c][i] = table[i] * (base.c[c][i] + h * k.c[c][i]);
    return r;
}

} // namespace

void Stepper::finish_step(SpectralField& v, double t) {
    apply_dealias_mask(v);
    leray_project(v);
    hermitian_symmetrize(v);
    // summed, not maxed: max() comparisons silently skip NaN
    double m = 0.0;
    for (int c = 0; c < 3; ++c)
        for (const cplx& z : v.c[c]) m += std::abs(z.real()) + std::abs(z.imag());
    if (!std::isfinite(m)) {
        std::ostringstream os;
        os << "non-finite coefficients at t=" << t;
        throw BlowUpError(t, os.str());
    }
}

void Stepper::step(SimState& s, double dt) {
    refresh_factors(dt);
    const SpectralField& v0 = s.v;

    SpectralField k1 = nonlinear_rhs(v0);
    SpectralField a = combined(v0, 0.5 * dt, k1, e_half_);
    SpectralField k2 = nonlinear_rhs(a);

    SpectralField b(lat_);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < b.c[c].size(); ++i)
            b.c[c][i] = e_half_[i] * v0.c[c][i] + 0.5 * dt * k2.c[c][i];
    SpectralField k3 = nonlinear_rhs(b);

    SpectralField d(lat_);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < d.c[c].size(); ++i)
            d.c[c][i] = e_full_[i] * v0.c[c][i] + dt * e_half_[i] * k3.c[c][i];
    SpectralField k4 = nonlinear_rhs(d);

    const double w = dt / 6.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < s.v.c[c].size(); ++i)
            s.v.c[c][i] = e_full_[i] * v0.c[c][i] +
                          w * (e_full_[i] * k1.c[c][i] + 2.0 * e_half_[i] * k2.c[c][i] +
                               2.0 * e_half_[i] * k3.c[c][i] + k4.c[c][i]);
    finish_step(s.v, s.t + dt);
}

void Stepper::step_with_tangent(SimState& s, SpectralField& z, double dt,
                                bool include_filter_in_coriolis) {
    refresh_factors(dt);
    // safe to alias: the final update reads and writes each index exactly once
    const SpectralField& v0 = s.v;
    const SpectralField& z0 = z;

    SpectralField k1 = nonlinear_rhs(v0);
    SpectralField l1 = tangent_rhs(v0, z0, include_filter_in_coriolis);
    SpectralField a = combined(v0, 0.5 * dt, k1, e_half_);
    SpectralField az = combined(z0, 0.5 * dt, l1, e_half_);

    SpectralField k2 = nonlinear_rhs(a);
    SpectralField l2 = tangent_rhs(a, az, include_filter_in_coriolis);

    SpectralField b(lat_), bz(lat_);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < b.c[c].size(); ++i) {
            b.c[c][i] = e_half_[i] * v0.c[c][i] + 0.5 * dt * k2.c[c][i];
            bz.c[c][i] = e_half_[i] * z0.c[c][i] + 0.5 * dt * l2.c[c][i];
        }
    SpectralField k3 = nonlinear_rhs(b);
    SpectralField l3 = tangent_rhs(b, bz, include_filter_in_coriolis);

    SpectralField d(lat_), dz(lat_);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < d.c[c].size(); ++i) {
            d.c[c][i] = e_full_[i] * v0.c[c][i] + dt * e_half_[i] * k3.c[c][i];
            dz.c[c][i] = e_full_[i] * z0.c[c][i] + dt * e_half_[i] * l3.c[c][i];
        }
    SpectralField k4 = nonlinear_rhs(d);
    SpectralField l4 = tangent_rhs(d, dz, include_filter_in_coriolis);

    const double w = dt / 6.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < s.v.c[c].size(); ++i) {
            s.v.c[c][i] = e_full_[i] * v0.c[c][i] +
                          w * (e_full_[i] * k1.c[c][i] + 2.0 * e_half_[i] * k2.c[c][i] +
                               2.0 * e_half_[i] * k3.c[c][i] + k4.c[c][i]);
            z.c[c][i] = e_full_[i] * z0.c[c][i] +
                        w * (e_full_[i] * l1.c[c][i] + 2.0 * e_half_[i] * l2.c[c][i] +
                             2.0 * e_half_[i] * l3.c[c][i] + l4.c[c][i]);
        }
    finish_step(s.v, s.t + dt);
    apply_dealias_mask(z);
    leray_project(z);
    hermitian_symmetrize(z);
}

double Stepper::cfl_dt(const SpectralField& v) {
    SpectralField filt = helmholtz_inverted(v, params_.alpha);
    PhysicalField g(lat_);
    ws_.to_physical(filt, g);
    double umax = 0.0;
    for (int c = 0; c < 3; ++c)
        for (double x : g.g[c]) umax = std::max(umax, std::abs(x));
    if (umax == 0.0) return cfg_.dt;
    double dx = 1e300;
    for (int j = 0; j < 3; ++j)
        dx = std::min(dx, 2.0 * M_PI * lat_->a[j] / lat_->n[j]);
    return std::min(cfg_.dt, cfg_.cfl_safety * dx / umax);
}

namespace {

struct Schedule {
    long n_steps;
    double dt;
    double t_last;   // length of the final, possibly shortened step
};

Schedule make_schedule(double from_t, double T, double dt) {
    if (T < from_t) throw Error("run target time is before the state time");
    const double span = T - from_t;
    long n_full = static_cast<long>(std::floor(span / dt + 1e-9));
    double rem = span - n_full * dt;
    if (rem < 1e-12 * std::max(1.0, std::abs(T))) rem = 0.0;
    return {n_full + (rem > 0.0 ? 1 : 0), dt, rem};
}

} // namespace

void run(Stepper& st, SimState& state, double T, long sample_stride, const SampleHook& hook) {
    const double dt = st.config().dt;
    const Schedule sch = make_schedule(state.t, T, dt);
    const long base_index = std::llround(state.t / dt);
    const double norm_ref = sobolev_norm(state.v, 0.0);

    if (hook) hook(state, base_index);
    for (long k = 0; k < sch.n_steps; ++k) {
        const bool last = k + 1 == sch.n_steps;
        const double h = (last && sch.t_last > 0.0) ? sch.t_last : dt;
        double h_eff = h;
        if (st.config().adapt) h_eff = std::min(h, st.cfl_dt(state.v));
        if (h_eff < h) {
            // adaptive sub-stepping inside one scheduled slot
            double done = 0.0;
            while (done < h) {
                const double hh = std::min(h_eff, h - done);
                st.step(state, hh);
                done += hh;
                state.t += hh;
            }
            state.t = (last && sch.t_last > 0.0) ? T : (base_index + k + 1) * dt;
        } else {
            st.step(state, h);
            state.t = (last && sch.t_last > 0.0) ? T : (base_index + k + 1) * dt;
        }
        const double n0 = sobolev_norm(state.v, 0.0);
        if (norm_ref > 0.0 && n0 > st.config().blowup_factor * norm_ref) {
            std::ostringstream os;
            os << "H^0 norm grew by " << n0 / norm_ref << " at t=" << state.t;
            throw BlowUpError(state.t, os.str());
        }
        if (hook && (last || (sample_stride > 0 && (base_index + k + 1) % sample_stride == 0)))
            hook(state, base_index + k + 1);
    }
}

void run_pair(Stepper& st, SimState& a, SimState& b, double T, long sample_stride,
              const PairHook& hook) {
    if (a.t != b.t) throw Error("pair members must start at the same time");
    const double dt = st.config().dt;
    const Schedule sch = make_schedule(a.t, T, dt);
    const long base_index = std::llround(a.t / dt);

    if (hook) hook(a, b, base_index);
    for (long k = 0; k < sch.n_steps; ++k) {
        const bool last = k + 1 == sch.n_steps;
        const double h = (last && sch.t_last > 0.0) ? sch.t_last : dt;
        st.step(a, h);
        st.step(b, h);
        const double t = (last && sch.t_last > 0.0) ? T : (base_index + k + 1) * dt;
        a.t = b.t = t;
        if (hook && (last || (sample_stride > 0 && (base_index + k + 1) % sample_stride == 0)))
            hook(a, b, base_index + k + 1);
    }
}

void run_tangent(Stepper& st, SimState& base, SpectralField& z, double T,
                 long sample_stride, bool include_filter_in_coriolis,
                 const TangentHook& hook) {
    const double dt = st.config().dt;
    const Schedule sch = make_schedule(base.t, T, dt);
    const long base_index = std::llround(base.t / dt);

    if (hook) hook(base, z, base_index);
    for (long k = 0; k < sch.n_steps; ++k) {
        const bool last = k + 1 == sch.n_steps;
        const double h = (last && sch.t_last > 0.0) ? sch.t_last : dt;
        st.step_with_tangent(base, z, h, include_filter_in_coriolis);
        base.t = (last && sch.t_last > 0.0) ? T : (base_index + k + 1) * dt;
        if (hook && (last || (sample_stride > 0 && (base_index + k + 1) % sample_stride == 0)))
            hook(base, z, base_index + k + 1);
    }
}

} // namespace rnsa
