#include "rnsa/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "rnsa/errors.hpp"

namespace rnsa {

namespace {
// fftw planner mutates global state
std::mutex planner_mu;

// The hot loops allocate and free multi-megabyte field buffers constantly.
// glibc hands blocks that size back to the kernel on every free, so each
// reuse pays mmap plus page-fault cost; keeping them in the arena roughly
// halves the step time.
#if defined(__GLIBC__)
const int malloc_tuned = [] {
    mallopt(M_MMAP_MAX, 0);
    mallopt(M_TRIM_THRESHOLD, -1);
    return 0;
}();
#endif
} // namespace

FftWorkspace::FftWorkspace(LatticePtr lat) : lat_(std::move(lat)) {
    const std::size_t np = lat_->points();
    buf_in_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(cplx) * np));
    buf_out_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(cplx) * np));
    if (!buf_in_ || !buf_out_) throw Error("fftw_malloc failed");
    std::lock_guard<std::mutex> lk(planner_mu);
    plan_fwd_ = fftw_plan_dft_3d(lat_->n[0], lat_->n[1], lat_->n[2],
                                 reinterpret_cast<fftw_complex*>(buf_in_),
                                 reinterpret_cast<fftw_complex*>(buf_out_),
                                 FFTW_FORWARD, FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_3d(lat_->n[0], lat_->n[1], lat_->n[2],
                                 reinterpret_cast<fftw_complex*>(buf_in_),
                                 reinterpret_cast<fftw_complex*>(buf_out_),
                                 FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plan_fwd_ || !plan_bwd_) throw Error("fftw plan creation failed");
}

FftWorkspace::~FftWorkspace() {
    std::lock_guard<std::mutex> lk(planner_mu);
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    fftw_free(buf_in_);
    fftw_free(buf_out_);
}

void FftWorkspace::component_to_physical(const std::vector<cplx>& comp,
                                         std::vector<double>& out) {
    const std::size_t np = lat_->points();
    std::memcpy(buf_in_, comp.data(), sizeof(cplx) * np);
    fftw_execute(static_cast<fftw_plan>(plan_bwd_));
    out.resize(np);
    for (std::size_t i = 0; i < np; ++i) out[i] = buf_out_[i].real();
}

void FftWorkspace::component_to_spectral(const std::vector<double>& g,
                                         std::vector<cplx>& out) {
    const std::size_t np = lat_->points();
    const double inv = 1.0 / static_cast<double>(np);
    for (std::size_t i = 0; i < np; ++i) buf_in_[i] = cplx(g[i], 0.0);
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
    out.resize(np);
    for (std::size_t i = 0; i < np; ++i) out[i] = inv * buf_out_[i];
}

void FftWorkspace::to_physical(const SpectralField& u, PhysicalField& out) {
    if (u.lat.get() != lat_.get()) throw Error("field lattice does not match workspace");
    out.lat = lat_;
    for (int c = 0; c < 3; ++c) component_to_physical(u.c[c], out.g[c]);
}

void FftWorkspace::to_spectral(const PhysicalField& g, SpectralField& out) {
    if (g.lat.get() != lat_.get()) throw Error("field lattice does not match workspace");
    out.lat = lat_;
    for (int c = 0; c < 3; ++c) component_to_spectral(g.g[c], out.c[c]);
}

PhysicalField to_physical(FftWorkspace& ws, const SpectralField& u) {
    PhysicalField g(ws.lattice());
    ws.to_physical(u, g);
    return g;
}

SpectralField to_spectral(FftWorkspace& ws, const PhysicalField& g) {
    SpectralField u(ws.lattice());
    ws.to_spectral(g, u);
    return u;
}

} // namespace rnsa
