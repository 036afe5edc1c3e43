#pragma once

#include <vector>

#include "rnsa/integrator.hpp"

namespace rnsa {

struct StateRecord {
    double t = 0.0;
    double norm0 = 0.0;
    double norm1 = 0.0;
    double norm_beta = 0.0;
    double norm_beta1 = 0.0;      // H^{beta+1}
    double alpha_energy = 0.0;    // <V, R_alpha V>_0
    double div_residual = 0.0;
};

StateRecord record_state(const SimState& s, AlphaParam ap, double beta);

struct AbsorbingReport {
    double sup_beta = 0.0;            // sup of norm_beta past the transient
    double max_window_integral = 0.0; // max over windows of trapezoid of nu*norm_beta1^2
    double transient = 0.0;
    double window = 0.0;
    long samples_used = 0;
};

// Records must be uniformly spaced in t; window must be a whole number of
// sample intervals and fit inside the post-transient span.
AbsorbingReport absorbing_check(const std::vector<StateRecord>& traj, double nu,
                                double window, double transient);

// One sampled instant of a difference trajectory W = Va - Vb, with the member
// norms and the pairing functional needed for the contraction estimates.
struct PairSampleRec {
    double t = 0.0;
    double w_norm0 = 0.0, w_norm1 = 0.0, w_norm_beta = 0.0;
    double lambda = 0.0;           // ||W||_1^2 / ||W||_0^2, 0 when W = 0
    double low_norm0 = 0.0, high_norm0 = 0.0;   // split at the reference rank
    double va_norm_beta = 0.0, vb_norm_beta = 0.0;
    double va_norm_beta1 = 0.0, vb_norm_beta1 = 0.0;
    double pairing_sum = 0.0;      // |<B(W',W),W>_0| + |<B(W,W'),W>_0|
};

struct K1Estimate {
    double pointwise = 0.0;   // nu^3 max_t (2 pairing - nu ||W||_1^2)/||W||_0^2
    double interval = 0.0;    // nu^3 max_j (dln||W||_0^2 + nu trapz lambda)/h
    double combined = 0.0;
};

K1Estimate estimate_k1(const std::vector<PairSampleRec>& samples, double nu);

// exp(-nu int_0^t lambda + K1 t / nu^3) with trapezoid quadrature over the
// sampled lambda history; t must not exceed the last sample time
double delta_of_t(const std::vector<PairSampleRec>& samples, double k1, double nu, double t);

struct GronwallReport {
    double c1 = 0.0, c2 = 0.0;
    double max_violation = 0.0;   // max over samples of ratio minus one, clipped at 0
    double first_violation_t = -1.0;
    double min_margin = 0.0;      // min over samples of bound/actual
};

// ||W(t)||_beta^2 <= ||W(0)||_beta^2 exp(2 int (c1 ||Va||_beta + c2 ||Vb||_{beta+1}))
GronwallReport gronwall_check(const std::vector<PairSampleRec>& samples, double c1, double c2);

struct DeltaReport {
    double k1 = 0.0;
    double max_violation = 0.0;
    double min_lambda_over_lambda1 = 0.0;
};

DeltaReport delta_check(const std::vector<PairSampleRec>& samples, double k1, double nu,
                        double lambda1);

// Squeezing data reduced to per-shell energies of the evolved difference, so
// many candidate ranks can be evaluated without re-running trajectories.
struct SqueezeCase {
    double initial_norm0 = 0.0;        // ||u - v||_0 at t = 0
    std::vector<double> shell_e0;      // H^0 energy of S u - S v per shell
    std::vector<double> shell_e1;      // |nch|^2-weighted energy per shell
};

SqueezeCase make_squeeze_case(const SpectralField& w0, const SpectralField& w_star);

struct SqueezeReport {
    long n0 = 0;
    long effective_rank = 0;
    double lambda_next = 0.0;
    double delta = 0.0;
    double t_star = 0.0;
    long cases = 0;
    long violations = 0;           // high part dominated but contraction > delta
    long vacuous = 0;              // hypothesis false (low part dominates)
    double max_contraction_high = 0.0;  // worst contraction among high-dominant cases
    double max_contraction_all = 0.0;
    double lambda_star_min = 0.0, lambda_star_max = 0.0;
    bool lambda_star_margin_all = false;   // lambda_star > lambda_{N0+1}/2 for every case
};

SqueezeReport squeezing_check(const std::vector<SqueezeCase>& cases, const Lattice& lat,
                              long n0, double delta, double t_star);

// smallest shell-boundary rank with zero violations; -1 if none exists
long minimal_squeezing_rank(const std::vector<SqueezeCase>& cases, const Lattice& lat,
                            double delta, double t_star, std::vector<SqueezeReport>* table);

struct FrechetReport {
    std::vector<double> epsilons;
    std::vector<double> remainder_norms;  // ||S(v+eps d) - S(v) - eps Z||_beta
    std::vector<double> ratios;           // remainder / eps
    double fitted_order = 0.0;            // least-squares slope in log-log
    bool degenerate = false;              // a remainder vanished; no fit possible
};

FrechetReport frechet_order(const std::vector<double>& epsilons,
                            const std::vector<double>& remainder_norms);

// max over probes of the H^0 norm of the part of z above rank n, per rank;
// probes are expected to be normalized by the caller
std::vector<double> tail_estimates(const std::vector<SpectralField>& probes_at_t,
                                   const Lattice& lat, const std::vector<long>& ranks);

} // namespace rnsa
