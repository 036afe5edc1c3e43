#include "rnsa/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "rnsa/errors.hpp"

namespace rnsa {

namespace {

std::vector<double> shell_energies(const SpectralField& u, double s) {
    const auto& shells = u.lat->shells();
    std::vector<double> e(shells.size(), 0.0);
    for (std::size_t si = 0; si < shells.size(); ++si) {
        const double w = s == 0.0 ? 1.0 : std::pow(shells[si].lambda, s);
        KahanSum acc;
        for (std::size_t idx : shells[si].mode_idx)
            acc.add(std::norm(u.c[0][idx]) + std::norm(u.c[1][idx]) + std::norm(u.c[2][idx]));
        e[si] = w * acc.value();
    }
    return e;
}

double check_uniform_spacing(const std::vector<StateRecord>& traj) {
    if (traj.size() < 2) throw Error("trajectory needs at least two records");
    const double h = traj[1].t - traj[0].t;
    if (!(h > 0.0)) throw Error("record times must increase");
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const double hi = traj[i].t - traj[i - 1].t;
        if (std::abs(hi - h) > 1e-9 * std::max(1.0, std::abs(traj[i].t)))
            throw Error("absorbing_check requires uniformly spaced records");
    }
    return h;
}

} // namespace

StateRecord record_state(const SimState& s, AlphaParam ap, double beta) {
    StateRecord r;
    r.t = s.t;
    r.norm0 = sobolev_norm(s.v, 0.0);
    r.norm1 = sobolev_norm(s.v, 1.0);
    r.norm_beta = sobolev_norm(s.v, beta);
    r.norm_beta1 = sobolev_norm(s.v, beta + 1.0);
    SpectralField filt = helmholtz_inverted(s.v, ap);
    r.alpha_energy = inner_product(s.v, filt, 0.0);
    r.div_residual = divergence_residual(s.v);
    return r;
}

AbsorbingReport absorbing_check(const std::vector<StateRecord>& traj, double nu,
                                double window, double transient) {
    const double h = check_uniform_spacing(traj);
    AbsorbingReport rep;
    rep.window = window;
    rep.transient = transient;

    std::vector<const StateRecord*> post;
    for (const auto& r : traj)
        if (r.t >= transient - 1e-12) post.push_back(&r);
    if (post.size() < 2) throw Error("no post-transient records to check");
    rep.samples_used = static_cast<long>(post.size());

    for (const auto* r : post) rep.sup_beta = std::max(rep.sup_beta, r->norm_beta);

    const long wsteps = std::lround(window / h);
    if (wsteps < 1 || std::abs(wsteps * h - window) > 1e-9 * std::max(1.0, window))
        throw Error("window must be a whole number of sample intervals");
    if (static_cast<std::size_t>(wsteps) >= post.size())
        throw Error("window longer than the post-transient span");

    // cumulative trapezoid of nu * norm_beta1^2
    std::vector<double> cum(post.size(), 0.0);
    for (std::size_t i = 1; i < post.size(); ++i) {
        const double f0 = nu * post[i - 1]->norm_beta1 * post[i - 1]->norm_beta1;
        const double f1 = nu * post[i]->norm_beta1 * post[i]->norm_beta1;
        cum[i] = cum[i - 1] + 0.5 * h * (f0 + f1);
    }
    for (std::size_t i = 0; i + wsteps < post.size(); ++i)
        rep.max_window_integral = std::max(rep.max_window_integral, cum[i + wsteps] - cum[i]);
    return rep;
}

K1Estimate estimate_k1(const std::vector<PairSampleRec>& samples, double nu) {
    K1Estimate est;
    const double nu3 = nu * nu * nu;
    for (const auto& s : samples) {
        if (s.w_norm0 == 0.0) continue;
        const double num = 2.0 * s.pairing_sum - nu * s.w_norm1 * s.w_norm1;
        est.pointwise = std::max(est.pointwise, nu3 * num / (s.w_norm0 * s.w_norm0));
    }
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const auto& p = samples[i - 1];
        const auto& q = samples[i];
        const double hstep = q.t - p.t;
        if (!(hstep > 0.0) || p.w_norm0 == 0.0 || q.w_norm0 == 0.0) continue;
        const double dln = 2.0 * (std::log(q.w_norm0) - std::log(p.w_norm0));
        const double lam = 0.5 * hstep * (p.lambda + q.lambda);
        est.interval = std::max(est.interval, nu3 * (dln + nu * lam) / hstep);
    }
    est.combined = std::max(est.pointwise, est.interval);
    return est;
}

double delta_of_t(const std::vector<PairSampleRec>& samples, double k1, double nu, double t) {
    if (samples.empty()) throw Error("empty lambda history");
    if (t < samples.front().t - 1e-12 || t > samples.back().t + 1e-12)
        throw Error("requested time outside the sampled history");
    const double t0 = samples.front().t;
    double integral = 0.0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const auto& p = samples[i - 1];
        const auto& q = samples[i];
        if (q.t <= t) {
            integral += 0.5 * (q.t - p.t) * (p.lambda + q.lambda);
            continue;
        }
        if (p.t < t) {
            // partial interval, linear interpolation of lambda
            const double frac = (t - p.t) / (q.t - p.t);
            const double lam_t = p.lambda + frac * (q.lambda - p.lambda);
            integral += 0.5 * (t - p.t) * (p.lambda + lam_t);
        }
        break;
    }
    return std::exp(-nu * integral + k1 * (t - t0) / (nu * nu * nu));
}

GronwallReport gronwall_check(const std::vector<PairSampleRec>& samples, double c1, double c2) {
    if (samples.empty()) throw Error("no pair samples");
    GronwallReport rep;
    rep.c1 = c1;
    rep.c2 = c2;
    rep.min_margin = 1e300;
    const double w0sq = samples.front().w_norm_beta * samples.front().w_norm_beta;
    if (w0sq == 0.0) {
        // zero difference stays zero; any bound holds
        rep.min_margin = 0.0;
        return rep;
    }
    double integral = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i > 0) {
            const auto& p = samples[i - 1];
            const auto& q = samples[i];
            const double gp = c1 * p.va_norm_beta + c2 * p.vb_norm_beta1;
            const double gq = c1 * q.va_norm_beta + c2 * q.vb_norm_beta1;
            integral += 0.5 * (q.t - p.t) * (gp + gq);
        }
        const double bound = w0sq * std::exp(2.0 * integral);
        const double actual = samples[i].w_norm_beta * samples[i].w_norm_beta;
        if (actual > bound && actual / bound - 1.0 > rep.max_violation) {
            rep.max_violation = actual / bound - 1.0;
            if (rep.first_violation_t < 0.0) rep.first_violation_t = samples[i].t;
        }
        if (actual > 0.0) rep.min_margin = std::min(rep.min_margin, bound / actual);
    }
    if (rep.min_margin == 1e300) rep.min_margin = 0.0;
    return rep;
}

DeltaReport delta_check(const std::vector<PairSampleRec>& samples, double k1, double nu,
                        double lambda1) {
    DeltaReport rep;
    rep.k1 = k1;
    rep.min_lambda_over_lambda1 = 1e300;
    if (samples.empty()) throw Error("no pair samples");
    const double w0sq = samples.front().w_norm0 * samples.front().w_norm0;
    for (const auto& s : samples) {
        if (s.w_norm0 > 0.0)
            rep.min_lambda_over_lambda1 = std::min(rep.min_lambda_over_lambda1, s.lambda / lambda1);
        if (w0sq == 0.0) continue;
        const double bound = delta_of_t(samples, k1, nu, s.t) * w0sq;
        const double actual = s.w_norm0 * s.w_norm0;
        if (bound > 0.0)
            rep.max_violation = std::max(rep.max_violation, actual / bound - 1.0);
    }
    if (rep.min_lambda_over_lambda1 == 1e300) rep.min_lambda_over_lambda1 = 0.0;
    rep.max_violation = std::max(rep.max_violation, 0.0);
    return rep;
}

SqueezeCase make_squeeze_case(const SpectralField& w0, const SpectralField& w_star) {
    SqueezeCase sc;
    sc.initial_norm0 = sobolev_norm(w0, 0.0);
    sc.shell_e0 = shell_energies(w_star, 0.0);
    sc.shell_e1 = shell_energies(w_star, 1.0);
    return sc;
}

namespace {

SqueezeReport evaluate_rank(const std::vector<SqueezeCase>& cases, const Lattice& lat,
                            std::size_t cut_shells, long n0_requested, double delta,
                            double t_star) {
    const auto& shells = lat.shells();
    SqueezeReport rep;
    rep.n0 = n0_requested;
    rep.effective_rank = cut_shells == 0 ? 0 : shells[cut_shells - 1].cum_dof;
    rep.lambda_next = cut_shells < shells.size() ? shells[cut_shells].lambda : 0.0;
    rep.delta = delta;
    rep.t_star = t_star;
    rep.cases = static_cast<long>(cases.size());
    rep.lambda_star_min = 1e300;
    rep.lambda_star_margin_all = true;
    for (const auto& sc : cases) {
        double low = 0.0, tot = 0.0, tot1 = 0.0;
        for (std::size_t si = 0; si < sc.shell_e0.size(); ++si) {
            tot += sc.shell_e0[si];
            tot1 += sc.shell_e1[si];
            if (si < cut_shells) low += sc.shell_e0[si];
        }
        const double high = std::max(tot - low, 0.0);
        if (tot == 0.0 || sc.initial_norm0 == 0.0) {
            ++rep.vacuous;
            continue;
        }
        const double lambda_star = tot1 / tot;
        rep.lambda_star_min = std::min(rep.lambda_star_min, lambda_star);
        rep.lambda_star_max = std::max(rep.lambda_star_max, lambda_star);
        if (rep.lambda_next > 0.0 && !(lambda_star > 0.5 * rep.lambda_next))
            rep.lambda_star_margin_all = false;
        const double contraction = std::sqrt(tot) / sc.initial_norm0;
        rep.max_contraction_all = std::max(rep.max_contraction_all, contraction);
        if (high >= low) {
            rep.max_contraction_high = std::max(rep.max_contraction_high, contraction);
            if (contraction > delta) ++rep.violations;
        } else {
            ++rep.vacuous;
        }
    }
    if (rep.lambda_star_min == 1e300) rep.lambda_star_min = 0.0;
    return rep;
}

} // namespace

// number of whole shells covering rank n0, rounding up mid-shell requests
static std::size_t shells_for_rank(const Lattice& lat, long n0) {
    const auto& shells = lat.shells();
    std::size_t cut = 0;
    long cum = 0;
    while (cut < shells.size() && cum < n0) {
        cum = shells[cut].cum_dof;
        ++cut;
    }
    return cut;
}

SqueezeReport squeezing_check(const std::vector<SqueezeCase>& cases, const Lattice& lat,
                              long n0, double delta, double t_star) {
    if (!(delta > 0.0) || !(delta < 0.25))
        throw Error("squeezing factor must lie in (0, 1/4)");
    return evaluate_rank(cases, lat, shells_for_rank(lat, n0), n0, delta, t_star);
}

long minimal_squeezing_rank(const std::vector<SqueezeCase>& cases, const Lattice& lat,
                            double delta, double t_star, std::vector<SqueezeReport>* table) {
    const auto& shells = lat.shells();
    long found = -1;
    for (std::size_t cut = 0; cut <= shells.size(); ++cut) {
        const long rank = cut == 0 ? 0 : shells[cut - 1].cum_dof;
        SqueezeReport rep = evaluate_rank(cases, lat, cut, rank, delta, t_star);
        if (table) table->push_back(rep);
        if (found < 0 && rep.violations == 0) {
            found = rank;
            if (!table) break;
        }
    }
    return found;
}

FrechetReport frechet_order(const std::vector<double>& epsilons,
                            const std::vector<double>& remainder_norms) {
    if (epsilons.size() != remainder_norms.size() || epsilons.size() < 2)
        throw Error("order fit needs matching lists with at least two points");
    FrechetReport rep;
    rep.epsilons = epsilons;
    rep.remainder_norms = remainder_norms;
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0)) throw Error("epsilons must be positive");
        rep.ratios.push_back(remainder_norms[i] / epsilons[i]);
        if (remainder_norms[i] <= 0.0) rep.degenerate = true;
    }
    if (rep.degenerate) return rep;
    // least-squares slope of log r against log eps
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(epsilons.size());
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        const double x = std::log(epsilons[i]);
        const double y = std::log(remainder_norms[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    rep.fitted_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return rep;
}

std::vector<double> tail_estimates(const std::vector<SpectralField>& probes_at_t,
                                   const Lattice& lat, const std::vector<long>& ranks) {
    std::vector<std::vector<double>> cum;   // per probe, cumulative shell H^0 energy
    std::vector<double> totals;
    for (const auto& z : probes_at_t) {
        auto e = shell_energies(z, 0.0);
        double run = 0.0;
        for (double& x : e) {
            run += x;
            x = run;
        }
        cum.push_back(std::move(e));
        totals.push_back(run);
    }
    std::vector<double> out;
    for (long rank : ranks) {
        const std::size_t cut = shells_for_rank(lat, rank);
        double worst = 0.0;
        for (std::size_t p = 0; p < cum.size(); ++p) {
            const double low = cut == 0 ? 0.0 : cum[p][cut - 1];
            worst = std::max(worst, std::sqrt(std::max(totals[p] - low, 0.0)));
        }
        out.push_back(worst);
    }
    return out;
}

} // namespace rnsa
