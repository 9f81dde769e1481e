#include "quaymaint/atom_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace quaymaint {

AtomGrid::AtomGrid(std::vector<double> v_min, std::vector<double> v_max, int n_atoms)
    : v_min_(std::move(v_min)), v_max_(std::move(v_max)), n_atoms_(n_atoms) {
    if (v_min_.empty() || v_min_.size() != v_max_.size()) {
        throw std::invalid_argument("AtomGrid: v_min/v_max must be non-empty and equal length");
    }
    if (n_atoms_ < 2) throw std::invalid_argument("AtomGrid: n_atoms must be >= 2");
    const std::size_t d = v_min_.size();
    delta_.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
        if (!(v_min_[k] < v_max_[k])) {
            throw std::invalid_argument("AtomGrid: requires v_min < v_max componentwise");
        }
        delta_[k] = (v_max_[k] - v_min_[k]) / static_cast<double>(n_atoms_ - 1);
    }
    size_ = 1;
    for (std::size_t k = 0; k < d; ++k) size_ *= static_cast<std::size_t>(n_atoms_);

    atoms_.resize(size_ * d);
    std::vector<int> idx(d, 0);
    for (std::size_t flat = 0; flat < size_; ++flat) {
        for (std::size_t k = 0; k < d; ++k) {
            atoms_[flat * d + k] = v_min_[k] + idx[k] * delta_[k];
        }
        for (std::size_t k = d; k-- > 0;) {
            if (++idx[k] < n_atoms_) break;
            idx[k] = 0;
        }
    }
}

std::size_t AtomGrid::flat_index(std::span<const int> idx) const {
    if (idx.size() != v_min_.size()) throw std::invalid_argument("flat_index: wrong rank");
    std::size_t flat = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] < 0 || idx[k] >= n_atoms_) throw std::out_of_range("flat_index: out of range");
        flat = flat * static_cast<std::size_t>(n_atoms_) + static_cast<std::size_t>(idx[k]);
    }
    return flat;
}

} // namespace quaymaint
