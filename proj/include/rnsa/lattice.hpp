#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace rnsa {

// One retained Fourier mode. n is the integer wave index, nch the rescaled
// wave vector (n1/a1, n2/a2, n3/a3), s = |nch|^2.
struct Mode {
    std::size_t idx;          // linear index into component storage
    std::array<int, 3> n;
    std::array<double, 3> nch;
    double s;
};

struct Shell {
    double lambda;            // distinct |nch|^2 value
    long dof;                 // 2 per wave vector, conjugates counted separately
    long cum_dof;             // inclusive cumulative dof through this shell
    std::vector<std::size_t> mode_idx;
};

// Periodic box [0,2*pi*a1]x[0,2*pi*a2]x[0,2*pi*a3] sampled on an n1 x n2 x n3
// grid, with sharp spectral truncation |n_j| <= kmax_j (2/3-rule by default).
// Mode enumeration order is fixed: lexicographic in (n1,n2,n3), and every
// reduction in the library walks it in that order.
class Lattice {
public:
    std::array<double, 3> a;
    std::array<int, 3> n;
    double dealias_fraction;
    std::array<int, 3> kmax;

    std::size_t points() const { return grid_points_; }
    const std::vector<Mode>& modes() const { return modes_; }          // canonical order, includes n=0
    const std::vector<std::pair<std::size_t, std::size_t>>& conj_pairs() const { return pairs_; }
    const std::vector<Shell>& shells() const { return shells_; }       // nonzero modes only, ascending
    std::size_t zero_mode_idx() const { return zero_idx_; }
    const std::vector<std::uint8_t>& retained_mask() const { return retained_; }

    double lambda1() const;
    long total_dof() const;

    std::size_t index_of(int i1, int i2, int i3) const {
        return (static_cast<std::size_t>(i1) * n[1] + i2) * n[2] + i3;
    }
    int wave_of(int i, int axis) const { return i <= n[axis] / 2 - 1 ? i : i - n[axis]; }
    int slot_of(int w, int axis) const { return w >= 0 ? w : w + n[axis]; }

    // |nch|^(2s) weights aligned with modes(); weight at n=0 is 0 for every s.
    const std::vector<double>& norm_weights(double s) const;

private:
    friend std::shared_ptr<const Lattice> make_lattice(std::array<double, 3>,
                                                       std::array<int, 3>,
                                                       double, bool);
    std::size_t grid_points_ = 0;
    std::size_t zero_idx_ = 0;
    std::vector<Mode> modes_;
    std::vector<std::pair<std::size_t, std::size_t>> pairs_;
    std::vector<Shell> shells_;
    std::vector<std::uint8_t> retained_;
    mutable std::mutex weights_mu_;
    mutable std::map<double, std::vector<double>> weights_;
};

using LatticePtr = std::shared_ptr<const Lattice>;

// Throws LatticeError on odd or tiny n, non-positive a, dealias_fraction
// outside (0, 2/3], or a[0] != 1 without the explicit override.
LatticePtr make_lattice(std::array<double, 3> a, std::array<int, 3> n,
                        double dealias_fraction = 2.0 / 3.0,
                        bool allow_a1_override = false);

} // namespace rnsa
