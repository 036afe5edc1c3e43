#pragma once

#include <functional>
#include <optional>

#include "rnsa/operators.hpp"

namespace rnsa {

struct SimParams {
    double nu = 1.0;
    AlphaParam alpha;
    CoriolisParam coriolis;
    std::optional<SpectralField> forcing;   // time independent, empty means zero
    bool nonlinearity_enabled = true;       // test hook for exact linear decay
};

enum class Scheme { ifrk4 };

struct StepperConfig {
    double dt = 1e-3;
    Scheme scheme = Scheme::ifrk4;
    double cfl_safety = 0.5;
    bool adapt = false;                     // cap dt by CFL of max |R_alpha V|
    double blowup_factor = 1e6;             // relative H^0 growth treated as blow-up
};

struct SimState {
    SpectralField v;
    double t = 0.0;
};

// full right-hand side F - nu A V - f P J P R_alpha V - B_alpha(V, V)
SpectralField rhs(FftWorkspace& ws, const SimParams& p, const SpectralField& v);

// Advances the state by one IFRK4 step of size dt: the viscous factor is exact
// per mode, Coriolis and the bilinear term are explicit, and the result is
// re-projected and re-symmetrized. Throws BlowUpError on non-finite or
// runaway coefficients.
class Stepper {
public:
    Stepper(LatticePtr lat, SimParams params, StepperConfig cfg);

    void step(SimState& s, double dt);
    const SimParams& params() const { return params_; }
    const StepperConfig& config() const { return cfg_; }
    FftWorkspace& workspace() { return ws_; }

    // joint step of base state and one tangent field along it
    void step_with_tangent(SimState& s, SpectralField& z, double dt,
                           bool include_filter_in_coriolis);

    double cfl_dt(const SpectralField& v);

private:
    LatticePtr lat_;
    SimParams params_;
    StepperConfig cfg_;
    FftWorkspace ws_;
    double cached_dt_ = -1.0;
    std::vector<double> e_half_, e_full_;
    void refresh_factors(double dt);
    SpectralField nonlinear_rhs(const SpectralField& v);
    SpectralField tangent_rhs(const SpectralField& v, const SpectralField& z,
                              bool include_filter);
    void finish_step(SpectralField& v, double t);
};

using SampleHook = std::function<void(const SimState&, long step_index)>;

// Runs from state.t to time T with the configured dt (final step shortened to
// land on T exactly). sample_stride > 0 invokes the hook at the initial state,
// every sample_stride-th step, and the final step. Sample times are
// step_index * dt so a resumed run reproduces labels bitwise.
void run(Stepper& st, SimState& state, double T, long sample_stride, const SampleHook& hook);

// Advances two states in lockstep with identical step schedules. The hook sees
// both members after each sampled step.
using PairHook = std::function<void(const SimState& a, const SimState& b, long step_index)>;
void run_pair(Stepper& st, SimState& a, SimState& b, double T, long sample_stride,
              const PairHook& hook);

// Advances base state and tangent field jointly; hook sees both.
using TangentHook = std::function<void(const SimState& base, const SpectralField& z,
                                       long step_index)>;
void run_tangent(Stepper& st, SimState& base, SpectralField& z, double T,
                 long sample_stride, bool include_filter_in_coriolis,
                 const TangentHook& hook);

} // namespace rnsa
