#include "rnsa/runner.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "rnsa/errors.hpp"
#include "rnsa/random_field.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace rnsa {

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir + ": " + ec.message());
}

ParsedConfig with_seed_override(const ParsedConfig& pc, const CmdOptions& opt) {
    if (!opt.seed_override) return pc;
    ExperimentConfig c = pc.cfg;
    c.seed = *opt.seed_override;
    return finalize_config(c);
}

SpectrumProfile full_band_profile(const Lattice& lat, double amplitude) {
    SpectrumProfile p;
    p.k_min = 0.0;
    p.k_max = std::sqrt(lat.shells().back().lambda);
    p.amplitude = amplitude;
    return p;
}

// Distributes indices over worker threads; results land in caller-owned
// per-index slots so the assembly order never depends on scheduling. The
// lowest failing index wins when rethrowing.
void parallel_indices(long count, int threads, const std::function<void(long)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (long i = 0; i < count; ++i) fn(i);
        return;
    }
    const long nw = std::min<long>(threads, count);
    std::vector<std::exception_ptr> errs(static_cast<std::size_t>(count));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nw));
    for (long w = 0; w < nw; ++w)
        pool.emplace_back([&, w] {
            for (long i = w; i < count; i += nw) {
                try {
                    fn(i);
                } catch (...) {
                    errs[static_cast<std::size_t>(i)] = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (long i = 0; i < count; ++i)
        if (errs[static_cast<std::size_t>(i)])
            std::rethrow_exception(errs[static_cast<std::size_t>(i)]);
}

std::vector<std::string> state_columns() {
    return {"t", "norm0", "norm1", "norm_beta", "norm_beta1", "alpha_energy", "div_residual"};
}

std::vector<std::string> state_row(const StateRecord& r) {
    return {format_real(r.t),          format_real(r.norm0),
            format_real(r.norm1),      format_real(r.norm_beta),
            format_real(r.norm_beta1), format_real(r.alpha_energy),
            format_real(r.div_residual)};
}

PairSampleRec pair_sample(FftWorkspace& ws, const SimState& a, const SimState& b,
                          AlphaParam ap, double beta, long rank_ref) {
    PairSampleRec r;
    r.t = a.t;
    SpectralField w = subtracted(a.v, b.v);
    r.w_norm0 = sobolev_norm(w, 0.0);
    r.w_norm1 = sobolev_norm(w, 1.0);
    r.w_norm_beta = sobolev_norm(w, beta);
    r.lambda = r.w_norm0 > 0.0 ? (r.w_norm1 * r.w_norm1) / (r.w_norm0 * r.w_norm0) : 0.0;
    ProjectionSplit sp = spectral_projection(w, rank_ref);
    r.low_norm0 = sobolev_norm(sp.low, 0.0);
    r.high_norm0 = sobolev_norm(sp.high, 0.0);
    r.va_norm_beta = sobolev_norm(a.v, beta);
    r.vb_norm_beta = sobolev_norm(b.v, beta);
    r.va_norm_beta1 = sobolev_norm(a.v, beta + 1.0);
    r.vb_norm_beta1 = sobolev_norm(b.v, beta + 1.0);
    if (r.w_norm0 > 0.0) {
        SpectralField bwv = bilinear(ws, w, b.v, ap);
        SpectralField bvw = bilinear(ws, b.v, w, ap);
        r.pairing_sum = std::abs(inner_product(bwv, w, 0.0)) +
                        std::abs(inner_product(bvw, w, 0.0));
    }
    return r;
}

json gronwall_json(const GronwallReport& g) {
    return json{{"c1", g.c1},
                {"c2", g.c2},
                {"max_violation", g.max_violation},
                {"first_violation_t", g.first_violation_t},
                {"min_margin", g.min_margin}};
}

json squeeze_json(const SqueezeReport& r) {
    return json{{"n0", r.n0},
                {"effective_rank", r.effective_rank},
                {"lambda_next", r.lambda_next},
                {"delta", r.delta},
                {"t_star", r.t_star},
                {"cases", r.cases},
                {"violations", r.violations},
                {"vacuous", r.vacuous},
                {"max_contraction_high", r.max_contraction_high},
                {"max_contraction_all", r.max_contraction_all},
                {"lambda_star_min", r.lambda_star_min},
                {"lambda_star_max", r.lambda_star_max},
                {"lambda_star_margin_all", r.lambda_star_margin_all}};
}

BoundsInput bounds_input_from(const ExperimentConfig& c, const LatticePtr& lat,
                              double rho_h, double rho_v) {
    BoundsInput b;
    b.nu = c.nu;
    b.rho_h = rho_h;
    b.rho_v = rho_v;
    b.lambda1 = lat->lambda1();
    b.c1 = c.c1;
    b.c2 = c.c2;
    b.c3 = c.c3;
    b.c_tilde = c.c_tilde;
    b.c = c.c;
    b.theta = c.theta;
    b.lattice = lat;
    return b;
}

} // namespace

RunContext make_context(const ParsedConfig& pc) {
    const ExperimentConfig& c = pc.cfg;
    RunContext ctx;
    ctx.pc = pc;
    ctx.lat = make_lattice({c.a1, c.a2, c.a3}, {c.n1, c.n2, c.n3}, c.dealias,
                           c.allow_anisotropic_a1);
    ctx.params.nu = c.nu;
    ctx.params.alpha = AlphaParam{c.alpha};
    ctx.params.coriolis = CoriolisParam{c.f};
    if (c.forcing_amplitude > 0.0)
        ctx.params.forcing = random_divfree_field(
            ctx.lat, c.forcing_seed, {c.forcing_k_min, c.forcing_k_max, c.forcing_amplitude});
    ctx.stepper.dt = c.dt;
    ctx.stepper.scheme = Scheme::ifrk4;
    ctx.stepper.cfl_safety = c.cfl_safety;
    ctx.stepper.adapt = c.adapt;
    ctx.sample_stride = std::max<long>(1, std::llround(c.sample_every / c.dt));
    return ctx;
}

SimState initial_state(const RunContext& ctx) {
    const ExperimentConfig& c = ctx.pc.cfg;
    SimState s;
    s.t = 0.0;
    if (c.init_amplitude > 0.0)
        s.v = random_divfree_field(ctx.lat, c.init_seed,
                                   {c.init_k_min, c.init_k_max, c.init_amplitude});
    else
        s.v = SpectralField(ctx.lat);
    return s;
}

int cmd_simulate(const ParsedConfig& pc0, const CmdOptions& opt) {
    const ParsedConfig pc = with_seed_override(pc0, opt);
    const ExperimentConfig& c = pc.cfg;
    RunContext ctx = make_context(pc);
    ensure_dir(opt.out_dir);
    write_text_file(opt.out_dir + "/effective.cfg", pc.effective_text);

    SimState state;
    if (opt.resume)
        state = read_checkpoint(*opt.resume, ctx.lat, ctx.params);
    else
        state = initial_state(ctx);
    if (c.t_final < state.t - 1e-12)
        throw ConfigError("t_final is before the checkpoint time");

    Stepper st(ctx.lat, ctx.params, ctx.stepper);
    CsvWriter csv(opt.out_dir + "/trajectory.csv", state_columns(), pc.hash);
    std::vector<StateRecord> records;
    SimState last_good = state;

    bool blew = false;
    double blow_t = 0.0;
    std::string blow_msg;
    auto hook = [&](const SimState& s, long) {
        StateRecord r = record_state(s, ctx.params.alpha, c.beta);
        records.push_back(r);
        csv.row(state_row(r));
        last_good = s;
    };
    try {
        run(st, state, std::max(c.t_final, state.t), ctx.sample_stride, hook);
    } catch (const BlowUpError& e) {
        blew = true;
        blow_t = e.t;
        blow_msg = e.what();
    }
    csv.write();
    write_checkpoint(opt.out_dir + "/final.ckpt", blew ? last_good : state, ctx.params);

    json rep;
    rep["final_t"] = blew ? last_good.t : state.t;
    rep["samples"] = records.size();
    rep["beta"] = c.beta;
    rep["transient"] = c.transient;
    rep["window"] = c.window;
    double s0 = 0.0, s1 = 0.0, sb = 0.0, sb1 = 0.0;
    long post = 0;
    for (const auto& r : records)
        if (r.t >= c.transient - 1e-12) {
            s0 = std::max(s0, r.norm0);
            s1 = std::max(s1, r.norm1);
            sb = std::max(sb, r.norm_beta);
            sb1 = std::max(sb1, r.norm_beta1);
            ++post;
        }
    rep["post_transient_samples"] = post;
    rep["sup_norm0"] = s0;
    rep["sup_norm1"] = s1;
    rep["sup_beta"] = sb;
    rep["sup_beta1"] = sb1;
    if (blew)
        rep["blowup"] = json{{"t", blow_t}, {"message", blow_msg}};
    else
        rep["blowup"] = false;
    try {
        AbsorbingReport ar = absorbing_check(records, c.nu, c.window, c.transient);
        rep["max_window_integral"] = ar.max_window_integral;
        rep["window_samples_used"] = ar.samples_used;
    } catch (const std::exception& e) {
        rep["window_error"] = e.what();
    }
    write_json_report(opt.out_dir + "/absorbing.json", rep, pc.hash);

    std::ostringstream os;
    os << "simulate: t=" << format_real(blew ? last_good.t : state.t)
       << " samples=" << records.size() << " sup|V|_beta=" << format_real(sb);
    if (blew) os << " BLOWUP at t=" << format_real(blow_t);
    std::cout << os.str() << "\n";
    return blew ? kExitBlowUp : kExitOk;
}

int cmd_pair(const ParsedConfig& pc0, const CmdOptions& opt) {
    const ParsedConfig pc = with_seed_override(pc0, opt);
    const ExperimentConfig& c = pc.cfg;
    RunContext ctx = make_context(pc);
    ensure_dir(opt.out_dir);
    write_text_file(opt.out_dir + "/effective.cfg", pc.effective_text);

    SimState base = initial_state(ctx);
    {
        Stepper st(ctx.lat, ctx.params, ctx.stepper);
        run(st, base, c.transient, 0, nullptr);
    }
    const double base_norm = sobolev_norm(base.v, 0.0);
    const double amp = c.pair_amplitude * (base_norm > 0.0 ? base_norm : 1.0);
    const SpectrumProfile noise = full_band_profile(*ctx.lat, amp);
    const long rank_ref = c.squeeze_n0 > 0 ? c.squeeze_n0 : ctx.lat->shells().front().cum_dof;

    const long npairs = c.pair_count;
    std::vector<std::vector<PairSampleRec>> samples(static_cast<std::size_t>(npairs));
    parallel_indices(npairs, opt.threads, [&](long i) {
        Stepper st(ctx.lat, ctx.params, ctx.stepper);
        SimState sa = base, sb = base;
        SpectralField na = random_divfree_field(
            ctx.lat, derive_seed(c.seed, seed_stream::pair_base + 2 * static_cast<std::uint64_t>(i)),
            noise);
        SpectralField nb = random_divfree_field(
            ctx.lat,
            derive_seed(c.seed, seed_stream::pair_base + 2 * static_cast<std::uint64_t>(i) + 1),
            noise);
        axpy(sa.v, 1.0, na);
        axpy(sb.v, 1.0, nb);
        auto& out = samples[static_cast<std::size_t>(i)];
        auto hook = [&](const SimState& a, const SimState& b, long) {
            out.push_back(pair_sample(st.workspace(), a, b, ctx.params.alpha, c.beta, rank_ref));
        };
        run_pair(st, sa, sb, base.t + c.pair_t_final, ctx.sample_stride, hook);
    });

    FftWorkspace est_ws(ctx.lat);
    const BilinearConstants bc = estimate_bilinear_constants(
        est_ws, c.beta, ctx.params.alpha, static_cast<int>(c.estimator_samples),
        derive_seed(c.seed, seed_stream::estimator));

    std::vector<K1Estimate> k1s(static_cast<std::size_t>(npairs));
    double k1_ens = 0.0;
    for (long i = 0; i < npairs; ++i) {
        k1s[static_cast<std::size_t>(i)] = estimate_k1(samples[static_cast<std::size_t>(i)], c.nu);
        k1_ens = std::max(k1_ens, k1s[static_cast<std::size_t>(i)].combined);
    }

    CsvWriter csv(opt.out_dir + "/pair.csv",
                  {"pair_index", "t", "w_norm0", "w_norm1", "w_norm_beta", "lambda",
                   "low_norm0", "high_norm0", "va_norm_beta", "vb_norm_beta", "va_norm_beta1",
                   "vb_norm_beta1", "pairing_sum", "delta_pred"},
                  pc.hash);
    json pair_list = json::array();
    double worst_g = 0.0, worst_d = 0.0, min_lam = 1e300;
    const double lambda1 = ctx.lat->lambda1();
    for (long i = 0; i < npairs; ++i) {
        const auto& ss = samples[static_cast<std::size_t>(i)];
        for (const auto& s : ss) {
            const double dp = delta_of_t(ss, k1_ens, c.nu, s.t);
            csv.row({format_real(static_cast<double>(i)), format_real(s.t),
                     format_real(s.w_norm0), format_real(s.w_norm1), format_real(s.w_norm_beta),
                     format_real(s.lambda), format_real(s.low_norm0), format_real(s.high_norm0),
                     format_real(s.va_norm_beta), format_real(s.vb_norm_beta),
                     format_real(s.va_norm_beta1), format_real(s.vb_norm_beta1),
                     format_real(s.pairing_sum), format_real(dp)});
        }
        const GronwallReport g = gronwall_check(ss, bc.d_emp, bc.c_emp);
        const DeltaReport d = delta_check(ss, k1_ens, c.nu, lambda1);
        worst_g = std::max(worst_g, g.max_violation);
        worst_d = std::max(worst_d, d.max_violation);
        min_lam = std::min(min_lam, d.min_lambda_over_lambda1);
        const auto& k1 = k1s[static_cast<std::size_t>(i)];
        pair_list.push_back(json{{"index", i},
                                 {"k1_pointwise", k1.pointwise},
                                 {"k1_interval", k1.interval},
                                 {"k1_combined", k1.combined},
                                 {"w0_norm0", ss.front().w_norm0},
                                 {"w_final_norm0", ss.back().w_norm0},
                                 {"gronwall", gronwall_json(g)},
                                 {"delta_max_violation", d.max_violation},
                                 {"min_lambda_over_lambda1", d.min_lambda_over_lambda1}});
    }
    csv.write();
    if (min_lam == 1e300) min_lam = 0.0;

    json rep;
    rep["base_t"] = base.t;
    rep["amplitude"] = amp;
    rep["rank_ref"] = rank_ref;
    rep["lambda1"] = lambda1;
    rep["estimator"] = json{{"c_emp", bc.c_emp},
                            {"d_emp", bc.d_emp},
                            {"d_emp_variant", bc.d_emp_variant},
                            {"samples", bc.samples},
                            {"skipped", bc.skipped}};
    rep["k1_ensemble"] = k1_ens;
    rep["max_gronwall_violation"] = worst_g;
    rep["max_delta_violation"] = worst_d;
    rep["min_lambda_over_lambda1"] = min_lam;
    rep["pairs"] = pair_list;
    write_json_report(opt.out_dir + "/pair_report.json", rep, pc.hash);

    const bool ok = worst_g <= 1e-8 && worst_d <= 1e-8;
    std::cout << "pair: pairs=" << npairs << " K1=" << format_real(k1_ens)
              << " max_gronwall_violation=" << format_real(worst_g)
              << " max_delta_violation=" << format_real(worst_d)
              << " min_lambda/lambda1=" << format_real(min_lam)
              << (ok ? "" : " CHECK FAILED") << "\n";
    return ok ? kExitOk : kExitCheckFailed;
}

int cmd_squeeze(const ParsedConfig& pc0, const CmdOptions& opt) {
    const ParsedConfig pc = with_seed_override(pc0, opt);
    const ExperimentConfig& c = pc.cfg;
    RunContext ctx = make_context(pc);
    ensure_dir(opt.out_dir);
    write_text_file(opt.out_dir + "/effective.cfg", pc.effective_text);

    SimState state = initial_state(ctx);
    double rho_h = 0.0, rho_v = 0.0;
    {
        Stepper st(ctx.lat, ctx.params, ctx.stepper);
        run(st, state, c.transient, 0, nullptr);
        auto hook = [&](const SimState& s, long) {
            rho_h = std::max(rho_h, sobolev_norm(s.v, 0.0));
            rho_v = std::max(rho_v, sobolev_norm(s.v, 1.0));
        };
        run(st, state, c.transient + c.window, ctx.sample_stride, hook);
    }
    const SimState base = state;

    double t_star = c.squeeze_t_star;
    std::string t_star_source = "config";
    if (!(t_star > 0.0)) {
        t_star = squeeze_time(bounds_input_from(c, ctx.lat, rho_h, rho_v));
        t_star_source = "derived";
    }

    const double base_norm = sobolev_norm(base.v, 0.0);
    const double amp = c.pair_amplitude * (base_norm > 0.0 ? base_norm : 1.0);
    const SpectrumProfile noise = full_band_profile(*ctx.lat, amp);

    const long npairs = c.squeeze_pairs;
    std::vector<SqueezeCase> cases(static_cast<std::size_t>(npairs));
    std::vector<double> lam0(static_cast<std::size_t>(npairs), 0.0);
    parallel_indices(npairs, opt.threads, [&](long i) {
        Stepper st(ctx.lat, ctx.params, ctx.stepper);
        SimState sa = base, sb = base;
        SpectralField na = random_divfree_field(
            ctx.lat,
            derive_seed(c.seed, seed_stream::squeeze_base + 2 * static_cast<std::uint64_t>(i)),
            noise);
        SpectralField nb = random_divfree_field(
            ctx.lat,
            derive_seed(c.seed, seed_stream::squeeze_base + 2 * static_cast<std::uint64_t>(i) + 1),
            noise);
        axpy(sa.v, 1.0, na);
        axpy(sb.v, 1.0, nb);
        SpectralField w0 = subtracted(sa.v, sb.v);
        const double w00 = sobolev_norm(w0, 0.0);
        const double w01 = sobolev_norm(w0, 1.0);
        lam0[static_cast<std::size_t>(i)] = w00 > 0.0 ? (w01 * w01) / (w00 * w00) : 0.0;
        run_pair(st, sa, sb, base.t + t_star, 0, nullptr);
        SpectralField w1 = subtracted(sa.v, sb.v);
        cases[static_cast<std::size_t>(i)] = make_squeeze_case(w0, w1);
    });

    std::vector<SqueezeReport> table;
    const long minimal = minimal_squeezing_rank(cases, *ctx.lat, c.squeeze_delta, t_star, &table);
    long primary_rank = c.squeeze_n0 > 0 ? c.squeeze_n0
                        : (minimal >= 0 ? minimal : ctx.lat->shells().front().cum_dof);
    const SqueezeReport primary =
        squeezing_check(cases, *ctx.lat, primary_rank, c.squeeze_delta, t_star);

    double lam0_min = 1e300;
    for (double l : lam0)
        if (l > 0.0) lam0_min = std::min(lam0_min, l);
    if (lam0_min == 1e300) lam0_min = 0.0;

    json rep;
    rep["t_star"] = json{{"value", t_star},
                         {"source", t_star_source},
                         {"rho_h", rho_h},
                         {"rho_v", rho_v}};
    rep["delta"] = c.squeeze_delta;
    rep["pairs"] = npairs;
    rep["amplitude"] = amp;
    rep["base_t"] = base.t;
    rep["lambda1"] = ctx.lat->lambda1();
    rep["lambda0_min"] = lam0_min;
    rep["minimal_rank"] = minimal;
    rep["primary"] = squeeze_json(primary);
    json tbl = json::array();
    for (const auto& r : table) tbl.push_back(squeeze_json(r));
    rep["table"] = tbl;
    // pairs start from a settled trajectory neighborhood, not the attractor itself
    rep["invariant_set_surrogate"] = true;
    write_json_report(opt.out_dir + "/squeeze.json", rep, pc.hash);

    const bool ok = primary.violations == 0 && minimal >= 0;
    std::cout << "squeeze: pairs=" << npairs << " t*=" << format_real(t_star) << " ("
              << t_star_source << ") minimal_rank=" << minimal
              << " primary_rank=" << primary.effective_rank
              << " violations=" << primary.violations << (ok ? "" : " CHECK FAILED") << "\n";
    return ok ? kExitOk : kExitCheckFailed;
}

int cmd_tangent(const ParsedConfig& pc0, const CmdOptions& opt) {
    const ParsedConfig pc = with_seed_override(pc0, opt);
    const ExperimentConfig& c = pc.cfg;
    RunContext ctx = make_context(pc);
    ensure_dir(opt.out_dir);
    write_text_file(opt.out_dir + "/effective.cfg", pc.effective_text);

    SimState base0 = initial_state(ctx);
    if (c.transient > 0.0) {
        Stepper st(ctx.lat, ctx.params, ctx.stepper);
        run(st, base0, c.transient, 0, nullptr);
    }

    SpectralField dir = random_divfree_field(
        ctx.lat, derive_seed(c.seed, seed_stream::tangent_direction),
        full_band_profile(*ctx.lat, 1.0));
    const double dir_beta = sobolev_norm(dir, c.beta);
    if (dir_beta > 0.0) scale(dir, 1.0 / dir_beta);

    const double T = base0.t + c.tangent_t_final;

    // nonlinear endpoints are variant independent: base, one per epsilon, one
    // for the finite-difference probe
    std::vector<double> eps = c.tangent_epsilons;
    SimState s_base = base0;
    {
        Stepper st(ctx.lat, ctx.params, ctx.stepper);
        run(st, s_base, T, 0, nullptr);
    }
    std::vector<SpectralField> ends(eps.size());
    parallel_indices(static_cast<long>(eps.size()), opt.threads, [&](long i) {
        Stepper st(ctx.lat, ctx.params, ctx.stepper);
        SimState s = base0;
        axpy(s.v, eps[static_cast<std::size_t>(i)], dir);
        run(st, s, T, 0, nullptr);
        ends[static_cast<std::size_t>(i)] = s.v;
    });
    SpectralField end_fd;
    {
        Stepper st(ctx.lat, ctx.params, ctx.stepper);
        SimState s = base0;
        axpy(s.v, c.tangent_fd_epsilon, dir);
        run(st, s, T, 0, nullptr);
        end_fd = s.v;
    }

    std::vector<std::pair<std::string, bool>> variants;
    if (c.tangent_variant == "filtered" || c.tangent_variant == "both")
        variants.emplace_back("filtered", true);
    if (c.tangent_variant == "unfiltered" || c.tangent_variant == "both")
        variants.emplace_back("unfiltered", false);

    json var_list = json::array();
    for (const auto& [vname, include_filter] : variants) {
        Stepper st(ctx.lat, ctx.params, ctx.stepper);
        SimState s = base0;
        SpectralField z = dir;
        run_tangent(st, s, z, T, 0, include_filter, nullptr);
        const double z_beta = sobolev_norm(z, c.beta);

        std::vector<double> rems(eps.size());
        for (std::size_t i = 0; i < eps.size(); ++i) {
            SpectralField r = subtracted(ends[i], s_base.v);
            axpy(r, -eps[i], z);
            rems[i] = sobolev_norm(r, c.beta);
        }
        const FrechetReport fr = frechet_order(eps, rems);

        SpectralField fd = subtracted(end_fd, s_base.v);
        scale(fd, 1.0 / c.tangent_fd_epsilon);
        axpy(fd, -1.0, z);
        const double fd_err = z_beta > 0.0 ? sobolev_norm(fd, c.beta) / z_beta : 0.0;

        json jr;
        jr["variant"] = vname;
        jr["epsilons"] = fr.epsilons;
        jr["remainder_norms"] = fr.remainder_norms;
        jr["ratios"] = fr.ratios;
        jr["fitted_order"] = fr.fitted_order;
        jr["degenerate"] = fr.degenerate;
        jr["fd_epsilon"] = c.tangent_fd_epsilon;
        jr["fd_relative_error"] = fd_err;
        jr["z_norm_beta"] = z_beta;
        var_list.push_back(jr);
    }

    // tail decay of tangent solutions above a spectral rank, one unit H^0
    // probe per stream
    const long nprobe = c.tail_probes;
    std::vector<SpectralField> zs(static_cast<std::size_t>(nprobe));
    parallel_indices(nprobe, opt.threads, [&](long j) {
        SpectralField d = random_divfree_field(
            ctx.lat, derive_seed(c.seed, seed_stream::probe_base + static_cast<std::uint64_t>(j)),
            full_band_profile(*ctx.lat, 1.0));
        Stepper st(ctx.lat, ctx.params, ctx.stepper);
        SimState s = base0;
        SpectralField z = d;
        run_tangent(st, s, z, base0.t + c.tail_t_star, 0, true, nullptr);
        zs[static_cast<std::size_t>(j)] = z;
    });
    const auto& shells = ctx.lat->shells();
    std::vector<long> ranks;
    ranks.push_back(0);
    for (std::size_t i = 0; i < shells.size() && i < static_cast<std::size_t>(c.tail_max_shells); ++i)
        ranks.push_back(shells[i].cum_dof);
    const std::vector<double> tails = tail_estimates(zs, *ctx.lat, ranks);
    long threshold_rank = -1;
    for (std::size_t i = 0; i < ranks.size(); ++i)
        if (tails[i] < 1.0) {
            threshold_rank = ranks[i];
            break;
        }

    json rep;
    rep["direction_norm_beta"] = 1.0;
    rep["base_t"] = base0.t;
    rep["t_final"] = c.tangent_t_final;
    rep["variants"] = var_list;
    rep["tail"] = json{{"t_star", c.tail_t_star},
                       {"probes", nprobe},
                       {"ranks", ranks},
                       {"estimates", tails},
                       {"threshold_rank", threshold_rank}};
    write_json_report(opt.out_dir + "/tangent.json", rep, pc.hash);

    std::ostringstream os;
    os << "tangent:";
    for (const auto& jr : var_list)
        os << " " << jr["variant"].get<std::string>()
           << " order=" << format_real(jr["fitted_order"].get<double>())
           << " fd_err=" << format_real(jr["fd_relative_error"].get<double>());
    os << " tail_threshold_rank=" << threshold_rank;
    std::cout << os.str() << "\n";
    return kExitOk;
}

int cmd_bounds(const ParsedConfig& pc0, const CmdOptions& opt) {
    const ParsedConfig pc = with_seed_override(pc0, opt);
    const ExperimentConfig& c = pc.cfg;
    ensure_dir(opt.out_dir);
    write_text_file(opt.out_dir + "/effective.cfg", pc.effective_text);

    LatticePtr lat = make_lattice({c.a1, c.a2, c.a3}, {c.n1, c.n2, c.n3}, c.dealias,
                                  c.allow_anisotropic_a1);
    double rho_h = c.rho_h, rho_v = c.rho_v;
    json provenance{{"rho_mode", c.bounds_rho_mode}};
    if (c.bounds_rho_mode == "measured") {
        if (c.bounds_measured_from.empty())
            throw ConfigError("measured rho mode requires bounds.measured_from");
        json j;
        try {
            j = json::parse(read_text_file(c.bounds_measured_from));
            rho_h = j.at("sup_norm0").get<double>();
            rho_v = j.at("sup_norm1").get<double>();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("cannot read measured radii: ") + e.what());
        }
        provenance["measured_from"] = c.bounds_measured_from;
    }

    const BoundsInput b = bounds_input_from(c, lat, rho_h, rho_v);
    const AttractorEstimate est = attractor_estimate(b);

    json rep;
    rep["provenance"] = provenance;
    rep["inputs"] = json{{"nu", b.nu},       {"rho_h", b.rho_h},   {"rho_v", b.rho_v},
                         {"lambda1", b.lambda1}, {"c1", b.c1},     {"c2", b.c2},
                         {"c3", b.c3},       {"c_tilde", b.c_tilde}, {"c", b.c},
                         {"theta", b.theta}};
    rep["k1"] = est.k1;
    rep["k2"] = est.k2;
    rep["k3"] = est.k3;
    rep["c4"] = est.c4;
    rep["c5"] = est.c5;
    rep["t_star"] = est.t_star;
    rep["n0_explicit"] = est.n0_explicit;
    rep["n0_min"] = est.n0_min;
    rep["lambda_n0_plus_1"] = est.lambda_n0_plus_1;
    rep["delta_star"] = est.delta_star;
    rep["l_star"] = est.l_star;
    rep["dimension_bound_discrete"] = est.db_bound;
    rep["dimension_bound_continuous"] = est.db_bound + 1.0;
    rep["rate_c"] = est.rate_c;
    rep["rate_exponent"] = est.rate_exponent;
    if (c.bounds_n0 >= 0) {
        json forced{{"n0", c.bounds_n0}};
        const double ds = delta_star(b, c.bounds_n0);
        forced["delta_star"] = ds;
        try {
            const DimensionBound db =
                dimension_bound(c.bounds_n0, lipschitz_bound(b), ds, b.theta);
            forced["dimension_bound_discrete"] = db.discrete;
            forced["dimension_bound_continuous"] = db.continuous;
        } catch (const std::exception& e) {
            forced["dimension_bound_error"] = e.what();
        }
        rep["forced_rank"] = forced;
    }
    write_json_report(opt.out_dir + "/bounds.json", rep, pc.hash);

    std::cout << "bounds: K3=" << format_real(est.k3) << " t*=" << format_real(est.t_star)
              << " N0_min=" << est.n0_min << " delta*=" << format_real(est.delta_star)
              << " dB<=" << format_real(est.db_bound) << "\n";
    return kExitOk;
}

namespace {

struct CheckResult {
    std::string name;
    bool pass;
    double measured;
    double tol;
    std::string note;
};

void push_check(std::vector<CheckResult>& out, const std::string& name, double measured,
                double tol, const std::string& note = "") {
    out.push_back({name, measured <= tol, measured, tol, note});
}

double max_coeff_diff(const SpectralField& a, const SpectralField& b) {
    double m = 0.0;
    for (int comp = 0; comp < 3; ++comp)
        for (std::size_t i = 0; i < a.c[comp].size(); ++i)
            m = std::max(m, std::abs(a.c[comp][i] - b.c[comp][i]));
    return m;
}

} // namespace

int cmd_verify(const ParsedConfig& pc0, const CmdOptions& opt) {
    const ParsedConfig pc = with_seed_override(pc0, opt);
    ensure_dir(opt.out_dir);
    write_text_file(opt.out_dir + "/effective.cfg", pc.effective_text);

    std::vector<CheckResult> checks;
    LatticePtr lat8 = make_lattice({1, 1, 1}, {8, 8, 8});
    LatticePtr lat8a = make_lattice({1, 2, 1}, {8, 8, 8});
    LatticePtr lat16 = make_lattice({1, 1, 1}, {16, 16, 16});

    { // shell enumeration against hand counts and brute force
        double m = std::abs(lat8->lambda1() - 1.0);
        m = std::max(m, std::abs(lat8a->lambda1() - 0.25));
        m = std::max(m, static_cast<double>(std::abs(lat8->shells().front().dof - 12)));
        long retained = 0;
        for (const Mode& mo : lat8->modes())
            if (!(mo.n[0] == 0 && mo.n[1] == 0 && mo.n[2] == 0)) ++retained;
        m = std::max(m, static_cast<double>(std::abs(lat8->total_dof() - 2 * retained)));
        std::vector<double> svals;
        for (const Mode& mo : lat8a->modes())
            if (!(mo.n[0] == 0 && mo.n[1] == 0 && mo.n[2] == 0)) svals.push_back(mo.s);
        std::sort(svals.begin(), svals.end());
        m = std::max(m, std::abs(svals.front() - lat8a->shells().front().lambda));
        push_check(checks, "shell_enumeration", m, 0.0);
    }
    { // rescaled wave vector on the anisotropic box
        double m = 1.0;
        for (const Mode& mo : lat8a->modes())
            if (mo.n[0] == 0 && mo.n[1] == 1 && mo.n[2] == 0)
                m = std::max({std::abs(mo.nch[0]), std::abs(mo.nch[1] - 0.5),
                              std::abs(mo.nch[2]), std::abs(mo.s - 0.25)});
        push_check(checks, "mode_geometry", m, 0.0);
    }

    FftWorkspace ws16(lat16);
    SpectralField u16 = random_divfree_field(lat16, 11, {1.0, 4.0, 1.0});
    { // synthesis followed by analysis returns the coefficients
        PhysicalField g = to_physical(ws16, u16);
        SpectralField back = to_spectral(ws16, g);
        apply_dealias_mask(back);
        const double m = max_coeff_diff(back, u16) / sobolev_norm(u16, 0.0);
        push_check(checks, "transform_roundtrip", m, 1e-13);
    }
    { // grid-point energy equals spectral energy
        PhysicalField g = to_physical(ws16, u16);
        KahanSum acc;
        for (int comp = 0; comp < 3; ++comp)
            for (double x : g.g[comp]) acc.add(x * x);
        const double phys = acc.value() / static_cast<double>(lat16->points());
        const double spec = sobolev_norm(u16, 0.0);
        const double m = std::abs(phys - spec * spec) / (spec * spec);
        push_check(checks, "parseval", m, 1e-12);
    }
    { // projection is a bitwise no-op the second time, even near a pure gradient
        SpectralField u = u16;
        for (const Mode& mo : lat16->modes()) {
            if (mo.s == 0.0) continue;
            const cplx phi(0.37 * std::cos(static_cast<double>(mo.idx % 17)),
                           0.21 * std::sin(static_cast<double>(mo.idx % 13)));
            for (int comp = 0; comp < 3; ++comp) u.c[comp][mo.idx] += phi * mo.nch[comp];
        }
        hermitian_symmetrize(u);
        SpectralField p1 = u;
        leray_project(p1);
        SpectralField p2 = p1;
        leray_project(p2);
        push_check(checks, "leray_idempotent", max_coeff_diff(p1, p2), 0.0);
        push_check(checks, "leray_divergence", divergence_residual(p1), 1e-13);
    }
    { // a pure gradient projects to exactly zero
        SpectralField grad(lat16);
        for (const Mode& mo : lat16->modes()) {
            if (mo.s == 0.0) continue;
            const cplx phi(1.0 / (1.0 + mo.s), -0.5 / (1.0 + mo.s));
            for (int comp = 0; comp < 3; ++comp) grad.c[comp][mo.idx] = phi * mo.nch[comp];
        }
        hermitian_symmetrize(grad);
        leray_project(grad);
        double m = 0.0;
        for (int comp = 0; comp < 3; ++comp)
            for (const cplx& z : grad.c[comp]) m = std::max(m, std::abs(z));
        push_check(checks, "gradient_annihilated", m, 0.0);
    }
    { // pseudospectral product against the literal convolution
        FftWorkspace ws8(lat8);
        SpectralField u = random_divfree_field(lat8, 21, {1.0, 2.5, 1.0});
        SpectralField v = random_divfree_field(lat8, 22, {1.0, 2.5, 1.3});
        double m = 0.0;
        for (double alpha : {0.0, 0.1, 1.0}) {
            SpectralField bp = bilinear(ws8, u, v, AlphaParam{alpha});
            if (opt.corrupt_bilinear) {
                bool done = false;
                for (int comp = 0; comp < 3 && !done; ++comp)
                    for (auto& z : bp.c[comp])
                        if (std::abs(z) > 0.0) {
                            z *= 1.000001;
                            done = true;
                            break;
                        }
            }
            SpectralField bo = bilinear_oracle(u, v, AlphaParam{alpha});
            m = std::max(m, max_coeff_diff(bp, bo) / sobolev_norm(bo, 0.0));
        }
        push_check(checks, "bilinear_vs_convolution", m, 1e-10,
                   opt.corrupt_bilinear ? "fault injected" : "");
    }
    { // <B(V,V), R V> vanishes
        SpectralField b = bilinear(ws16, u16, u16, AlphaParam{0.1});
        SpectralField filt = helmholtz_inverted(u16, AlphaParam{0.1});
        const double n0 = sobolev_norm(u16, 0.0);
        const double m = std::abs(inner_product(b, filt, 0.0)) /
                         (sobolev_norm(u16, 1.0) * n0 * n0);
        push_check(checks, "energy_orthogonality", m, 1e-12);
    }
    { // rotation term is skew against the filtered field
        const double f = 3.0;
        SpectralField w = coriolis_apply(u16, CoriolisParam{f}, AlphaParam{0.1});
        SpectralField filt = helmholtz_inverted(u16, AlphaParam{0.1});
        const double n0 = sobolev_norm(u16, 0.0);
        const double m = std::abs(inner_product(w, filt, 0.0)) / (f * n0 * n0);
        push_check(checks, "coriolis_skew", m, 1e-12);
    }
    { // pure decay matches exp(-nu s t) per mode
        SimParams p;
        p.nu = 0.7;
        p.nonlinearity_enabled = false;
        StepperConfig sc;
        sc.dt = 0.01;
        Stepper st(lat16, p, sc);
        SimState s{u16, 0.0};
        double m = 0.0;
        for (int k = 1; k <= 20; ++k) {
            st.step(s, sc.dt);
            s.t = k * sc.dt;
            double worst = 0.0;
            for (const Mode& mo : lat16->modes())
                for (int comp = 0; comp < 3; ++comp) {
                    const cplx exact = u16.c[comp][mo.idx] * std::exp(-p.nu * mo.s * s.t);
                    if (std::abs(exact) < 1e-30) continue;
                    worst = std::max(worst, std::abs(s.v.c[comp][mo.idx] - exact) / std::abs(exact));
                }
            m = std::max(m, worst / k);
        }
        push_check(checks, "viscous_decay_exact", m, 1e-14);
    }
    { // inviscid unforced runs conserve the filtered energy
        SimParams p;
        p.nu = 0.0;
        p.alpha = AlphaParam{0.01};
        p.coriolis = CoriolisParam{2.0};
        StepperConfig sc;
        sc.dt = 1e-3;
        Stepper st(lat16, p, sc);
        SimState s{u16, 0.0};
        const double e0 = inner_product(s.v, helmholtz_inverted(s.v, p.alpha), 0.0);
        run(st, s, 0.1, 0, nullptr);
        const double e1 = inner_product(s.v, helmholtz_inverted(s.v, p.alpha), 0.0);
        push_check(checks, "inviscid_invariant", std::abs(e1 - e0) / std::abs(e0), 1e-8);
    }
    { // global error shrinks by ~2^4 when dt halves
        SimParams p;
        p.nu = 0.05;
        p.alpha = AlphaParam{0.1};
        p.coriolis = CoriolisParam{1.0};
        auto final_at = [&](double dt) {
            StepperConfig sc;
            sc.dt = dt;
            Stepper st(lat16, p, sc);
            SimState s{u16, 0.0};
            run(st, s, 0.12, 0, nullptr);
            return s.v;
        };
        SpectralField ref = final_at(7.5e-4);
        SpectralField v1 = final_at(6e-3);
        SpectralField v2 = final_at(3e-3);
        const double e1 = sobolev_norm(subtracted(v1, ref), 0.0);
        const double e2 = sobolev_norm(subtracted(v2, ref), 0.0);
        const double order = (e1 > 0.0 && e2 > 0.0) ? std::log2(e1 / e2) : 0.0;
        checks.push_back({"temporal_order", order >= 3.5, order, 3.5,
                          "measured order, pass when >= tol"});
    }
    { // checkpoint round trip is bitwise; corruption is detected
        SimParams p;
        p.nu = 0.3;
        p.alpha = AlphaParam{0.2};
        p.coriolis = CoriolisParam{1.5};
        SimState s{u16, 0.3125};
        const std::string path = opt.out_dir + "/verify_roundtrip.ckpt";
        write_checkpoint(path, s, p);
        SimState back = read_checkpoint(path, lat16, p);
        double m = max_coeff_diff(back.v, s.v);
        m = std::max(m, std::abs(back.t - s.t));
        bool detected = true;
        std::string raw = read_text_file(path);
        raw[raw.size() / 2] = static_cast<char>(raw[raw.size() / 2] ^ 0x40);
        const std::string bad = opt.out_dir + "/verify_corrupt.ckpt";
        write_text_file(bad, raw);
        try {
            read_checkpoint(bad, lat16, p);
            detected = false;
        } catch (const CheckpointError&) {
        }
        write_text_file(bad, raw.substr(0, raw.size() / 3));
        try {
            read_checkpoint(bad, lat16, p);
            detected = false;
        } catch (const CheckpointError&) {
        }
        std::string magic = read_text_file(path);
        magic[0] = 'X';
        write_text_file(bad, magic);
        try {
            read_checkpoint(bad, lat16, p);
            detected = false;
        } catch (const CheckpointError& e) {
            if (e.kind != CheckpointError::Kind::magic) detected = false;
        }
        if (!detected) m = std::max(m, 1.0);
        push_check(checks, "checkpoint_roundtrip", m, 0.0);
    }
    { // identical configs give identical trajectories
        SimParams p;
        p.nu = 0.4;
        p.alpha = AlphaParam{0.05};
        p.coriolis = CoriolisParam{1.0};
        StepperConfig sc;
        sc.dt = 1e-3;
        auto run_once = [&]() {
            Stepper st(lat16, p, sc);
            SimState s{random_divfree_field(lat16, 99, {1.0, 3.0, 1.0}), 0.0};
            run(st, s, 0.05, 0, nullptr);
            return s.v;
        };
        push_check(checks, "determinism_rerun", max_coeff_diff(run_once(), run_once()), 0.0);
    }
    { // stopping at a checkpoint and resuming reproduces the direct run
        SimParams p;
        p.nu = 0.4;
        p.alpha = AlphaParam{0.05};
        p.coriolis = CoriolisParam{1.0};
        StepperConfig sc;
        sc.dt = 1e-3;
        Stepper st(lat16, p, sc);
        SimState direct{random_divfree_field(lat16, 99, {1.0, 3.0, 1.0}), 0.0};
        run(st, direct, 0.04, 0, nullptr);
        Stepper st2(lat16, p, sc);
        SimState half{random_divfree_field(lat16, 99, {1.0, 3.0, 1.0}), 0.0};
        run(st2, half, 0.02, 0, nullptr);
        const std::string path = opt.out_dir + "/verify_resume.ckpt";
        write_checkpoint(path, half, p);
        SimState resumed = read_checkpoint(path, lat16, p);
        Stepper st3(lat16, p, sc);
        run(st3, resumed, 0.04, 0, nullptr);
        push_check(checks, "resume_bitwise", max_coeff_diff(direct.v, resumed.v), 0.0);
    }
    { // canonical echo is a fixed point and JSON input is equivalent
        ParsedConfig base = finalize_config(ExperimentConfig{});
        ParsedConfig reparsed = parse_config_text(base.effective_text);
        double m = base.effective_text == reparsed.effective_text ? 0.0 : 1.0;
        json as_json;
        {
            std::istringstream in(base.effective_text);
            std::string line, section;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == '#') continue;
                if (line.front() == '[') {
                    section = line.substr(1, line.size() - 2);
                    continue;
                }
                const auto eq = line.find('=');
                if (eq == std::string::npos) continue;
                std::string key = line.substr(0, eq);
                std::string val = line.substr(eq + 1);
                while (!key.empty() && key.back() == ' ') key.pop_back();
                while (!val.empty() && val.front() == ' ') val.erase(val.begin());
                as_json[section][key] = val;
            }
        }
        ParsedConfig from_json = parse_config_text(as_json.dump());
        if (from_json.hash != base.hash) m = std::max(m, 1.0);
        bool suggested = false;
        try {
            parse_config_text("[params]\nnuu = 2\n");
        } catch (const ConfigError& e) {
            suggested = std::string(e.what()).find("nu") != std::string::npos;
        }
        if (!suggested) m = std::max(m, 1.0);
        push_check(checks, "config_echo", m, 0.0);
    }
    { // closed-form constants at unit inputs
        BoundsInput b;
        b.lattice = lat16;
        const Kvals k = compute_k(b);
        double m = std::abs(k.k3 * k.k3 - 15.5);
        m = std::max(m, std::abs(squeeze_time(b) - 1.0 / std::sqrt(15.5)));
        m = std::max(m, std::abs(derived_c4(b) - 0.5 * (1.0 - std::exp(-1.0))));
        m = std::max(m, std::abs(derived_c5(b) - 27.0 / 16.0));
        push_check(checks, "bounds_closed_form", m, 1e-12);
    }
    { // low + high reproduces the field bitwise and the parts are orthogonal
        ProjectionSplit sp = spectral_projection(u16, 7);
        SpectralField sum = added(sp.low, sp.high);
        double m = max_coeff_diff(sum, u16);
        const double n0 = sobolev_norm(u16, 0.0);
        const double ortho = std::abs(inner_product(sp.low, sp.high, 0.0)) / (n0 * n0);
        bool rank_ok = sp.effective_rank >= sp.requested_rank && sp.lambda_next > 0.0;
        if (!rank_ok || ortho > 1e-14) m = std::max(m, 1.0);
        push_check(checks, "projection_split", m, 0.0);
    }

    bool all = true;
    json jchecks = json::array();
    for (const auto& ck : checks) {
        all = all && ck.pass;
        std::ostringstream os;
        os << (ck.pass ? "[ PASS ] " : "[ FAIL ] ") << ck.name << " measured=" << format_real(ck.measured)
           << " tol=" << format_real(ck.tol);
        if (!ck.note.empty()) os << " (" << ck.note << ")";
        std::cout << os.str() << "\n";
        jchecks.push_back(json{{"name", ck.name},
                               {"pass", ck.pass},
                               {"measured", ck.measured},
                               {"tolerance", ck.tol},
                               {"note", ck.note}});
    }
    json rep;
    rep["checks"] = jchecks;
    rep["all_pass"] = all;
    rep["fault_injected"] = opt.corrupt_bilinear;
    write_json_report(opt.out_dir + "/verify.json", rep, pc.hash);
    std::cout << (all ? "verify: all checks passed" : "verify: CHECK FAILED") << "\n";
    return all ? kExitOk : kExitCheckFailed;
}

} // namespace rnsa
