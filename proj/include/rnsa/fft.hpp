#pragma once

#include "rnsa/field.hpp"

namespace rnsa {

// Owns FFTW plans and staging buffers for one lattice. Plans are created with
// FFTW_ESTIMATE so plan choice never depends on timing, keeping runs
// bit-reproducible. Not thread safe; use one workspace per thread.
class FftWorkspace {
public:
    explicit FftWorkspace(LatticePtr lat);
    ~FftWorkspace();
    FftWorkspace(const FftWorkspace&) = delete;
    FftWorkspace& operator=(const FftWorkspace&) = delete;

    const LatticePtr& lattice() const { return lat_; }

    // unnormalized synthesis u(x) = sum_n u_n exp(i n.x scaled); real parts kept
    void to_physical(const SpectralField& u, PhysicalField& out);
    // analysis with 1/(n1 n2 n3) normalization; fills every mode slot
    void to_spectral(const PhysicalField& g, SpectralField& out);

    void component_to_physical(const std::vector<cplx>& comp, std::vector<double>& out);
    void component_to_spectral(const std::vector<double>& g, std::vector<cplx>& out);

private:
    LatticePtr lat_;
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
    cplx* buf_in_ = nullptr;
    cplx* buf_out_ = nullptr;
};

PhysicalField to_physical(FftWorkspace& ws, const SpectralField& u);
SpectralField to_spectral(FftWorkspace& ws, const PhysicalField& g);

} // namespace rnsa
