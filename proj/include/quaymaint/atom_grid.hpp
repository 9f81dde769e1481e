#pragma once

#include <span>
#include <vector>

namespace quaymaint {

/**
 * Cartesian support grid for the categorical critic: per objective k,
 * n_atoms points z = v_min[k] + i * delta[k] with
 * delta[k] = (v_max[k] - v_min[k]) / (n_atoms - 1).
 *
 * Flat indexing is first-objective-major: flat = sum_k idx[k] * n^(d-1-k).
 */
class AtomGrid {
public:
    AtomGrid(std::vector<double> v_min, std::vector<double> v_max, int n_atoms);

    int dims() const { return static_cast<int>(v_min_.size()); }
    int atoms_per_dim() const { return n_atoms_; }
    std::size_t size() const { return size_; }

    double v_min(int k) const { return v_min_[static_cast<std::size_t>(k)]; }
    double v_max(int k) const { return v_max_[static_cast<std::size_t>(k)]; }
    double delta(int k) const { return delta_[static_cast<std::size_t>(k)]; }

    /// d-vector of the atom at a flat index.
    std::span<const double> atom(std::size_t flat) const {
        return {atoms_.data() + flat * v_min_.size(), v_min_.size()};
    }

    std::size_t flat_index(std::span<const int> idx) const;

private:
    std::vector<double> v_min_;
    std::vector<double> v_max_;
    std::vector<double> delta_;
    int n_atoms_ = 0;
    std::size_t size_ = 0;
    std::vector<double> atoms_; // size_ * d, row-major
};

} // namespace quaymaint
