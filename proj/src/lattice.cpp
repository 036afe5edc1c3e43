#include "rnsa/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rnsa/errors.hpp"

namespace rnsa {

double Lattice::lambda1() const {
    if (shells_.empty()) throw LatticeError("lattice has no nonzero retained modes");
    return shells_.front().lambda;
}

long Lattice::total_dof() const {
    return shells_.empty() ? 0 : shells_.back().cum_dof;
}

const std::vector<double>& Lattice::norm_weights(double s) const {
    std::lock_guard<std::mutex> lk(weights_mu_);
    auto it = weights_.find(s);
    if (it != weights_.end()) return it->second;
    std::vector<double> w(modes_.size());
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        w[i] = modes_[i].s == 0.0 ? 0.0 : std::pow(modes_[i].s, s);
    }
    return weights_.emplace(s, std::move(w)).first->second;
}

LatticePtr make_lattice(std::array<double, 3> a, std::array<int, 3> n,
                        double dealias_fraction, bool allow_a1_override) {
    for (int j = 0; j < 3; ++j) {
        if (n[j] < 4 || n[j] % 2 != 0) {
            std::ostringstream os;
            os << "grid size n[" << j << "]=" << n[j] << " must be even and >= 4";
            throw LatticeError(os.str());
        }
        if (!(a[j] > 0.0)) throw LatticeError("aspect ratios must be positive");
    }
    if (a[0] != 1.0 && !allow_a1_override)
        throw LatticeError("a[0] != 1 breaks the normalization a1 = 1; pass the override to proceed");
    if (!(dealias_fraction > 0.0) || dealias_fraction > 2.0 / 3.0 + 1e-12)
        throw LatticeError("dealias_fraction must lie in (0, 2/3]; larger values alias quadratic products");

    auto lat = std::make_shared<Lattice>();
    lat->a = a;
    lat->n = n;
    lat->dealias_fraction = dealias_fraction;
    lat->grid_points_ = static_cast<std::size_t>(n[0]) * n[1] * n[2];
    for (int j = 0; j < 3; ++j) {
        int k = static_cast<int>(std::floor(dealias_fraction * (n[j] / 2)));
        lat->kmax[j] = std::min(k, n[j] / 2 - 1);
        if (lat->kmax[j] < 1) throw LatticeError("truncation leaves no nonzero modes on some axis");
    }

    lat->retained_.assign(lat->grid_points_, 0);
    for (int n1 = -lat->kmax[0]; n1 <= lat->kmax[0]; ++n1)
        for (int n2 = -lat->kmax[1]; n2 <= lat->kmax[1]; ++n2)
            for (int n3 = -lat->kmax[2]; n3 <= lat->kmax[2]; ++n3) {
                Mode m;
                m.n = {n1, n2, n3};
                m.nch = {n1 / a[0], n2 / a[1], n3 / a[2]};
                m.s = m.nch[0] * m.nch[0] + m.nch[1] * m.nch[1] + m.nch[2] * m.nch[2];
                m.idx = lat->index_of(lat->slot_of(n1, 0), lat->slot_of(n2, 1), lat->slot_of(n3, 2));
                lat->retained_[m.idx] = 1;
                if (n1 == 0 && n2 == 0 && n3 == 0) lat->zero_idx_ = m.idx;
                lat->modes_.push_back(m);
            }

    for (const Mode& m : lat->modes_) {
        const auto& w = m.n;
        bool positive = w[0] > 0 || (w[0] == 0 && (w[1] > 0 || (w[1] == 0 && w[2] > 0)));
        if (!positive) continue;
        std::size_t minus = lat->index_of(lat->slot_of(-w[0], 0), lat->slot_of(-w[1], 1),
                                          lat->slot_of(-w[2], 2));
        lat->pairs_.emplace_back(m.idx, minus);
    }

    // group nonzero modes into eigenvalue shells, tolerant of roundoff in |nch|^2
    std::vector<const Mode*> nz;
    for (const Mode& m : lat->modes_)
        if (m.s > 0.0) nz.push_back(&m);
    std::sort(nz.begin(), nz.end(), [](const Mode* x, const Mode* y) { return x->s < y->s; });
    long cum = 0;
    for (const Mode* m : nz) {
        if (lat->shells_.empty() ||
            m->s - lat->shells_.back().lambda > 1e-12 * std::max(1.0, lat->shells_.back().lambda)) {
            Shell sh;
            sh.lambda = m->s;
            sh.dof = 0;
            sh.cum_dof = cum;
            lat->shells_.push_back(sh);
        }
        Shell& sh = lat->shells_.back();
        sh.dof += 2;
        sh.cum_dof = (cum += 2);
        sh.mode_idx.push_back(m->idx);
    }
    return lat;
}

} // namespace rnsa
