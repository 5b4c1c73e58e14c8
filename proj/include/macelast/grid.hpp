#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace macelast {

/// Node sequence of one coordinate axis together with its primal and dual
/// spacings.
///
/// For nodes x_0 < ... < x_n the primal (cell) widths are
/// h_{i+1/2} = x_{i+1} - x_i, i = 0..n-1, and the dual widths are
/// h_i = (h_{i-1/2} + h_{i+1/2}) / 2 for interior i with the half-cell values
/// h_0 = h_{1/2} / 2 and h_n = h_{n-1/2} / 2 at the two ends.
class AxisPartition {
public:
    /// Throws std::invalid_argument unless nodes has at least two strictly
    /// increasing, finite entries.
    explicit AxisPartition(std::vector<double> nodes);

    std::size_t cells() const { return cell_widths_.size(); }
    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> cell_widths() const { return cell_widths_; }
    std::span<const double> dual_widths() const { return dual_widths_; }

    double node(std::size_t i) const { return nodes_[i]; }
    double midpoint(std::size_t i) const { return 0.5 * (nodes_[i] + nodes_[i + 1]); }
    double cell_width(std::size_t i) const { return cell_widths_[i]; }
    double dual_width(std::size_t i) const { return dual_widths_[i]; }

    double lower() const { return nodes_.front(); }
    double upper() const { return nodes_.back(); }
    double length() const { return nodes_.back() - nodes_.front(); }

    double min_cell_width() const;
    double max_cell_width() const;

    friend bool operator==(const AxisPartition& a, const AxisPartition& b)
    {
        return a.nodes_ == b.nodes_;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> cell_widths_;
    std::vector<double> dual_widths_;
};

AxisPartition uniform_axis(std::size_t cells, double lower, double upper);

/// Uniform partition whose interior nodes are shifted by r_i * amplitude * H,
/// H = (upper - lower) / cells, r_i uniform in (-1, 1) drawn from a generator
/// seeded with `seed`. Endpoints stay fixed. amplitude must lie in [0, 0.5).
AxisPartition perturbed_axis(std::size_t cells, double lower, double upper,
                             double amplitude, std::uint64_t seed);

/// Bisects every cell at its midpoint.
AxisPartition refine_axis(const AxisPartition& p);

/// Tensor product of 2 or 3 axis partitions.
class TensorGrid {
public:
    explicit TensorGrid(std::vector<AxisPartition> axes);

    int dims() const { return static_cast<int>(axes_.size()); }
    const AxisPartition& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
    std::size_t cells(int a) const { return axis(a).cells(); }
    const std::vector<AxisPartition>& axes() const { return axes_; }

    friend bool operator==(const TensorGrid& a, const TensorGrid& b) { return a.axes_ == b.axes_; }

private:
    std::vector<AxisPartition> axes_;
};

using GridPtr = std::shared_ptr<const TensorGrid>;

GridPtr make_grid(std::vector<AxisPartition> axes);
GridPtr uniform_grid(int dims, std::size_t cells, double lower = 0.0, double upper = 1.0);
GridPtr refine(const TensorGrid& g);

/// min over all axes and cells of the cell width divided by the max over all
/// axes and cells (the grid regularity constant).
double regularity_ratio(const TensorGrid& g);

/// One node coordinate per line, full round-trip precision.
void write_nodes(std::ostream& os, const AxisPartition& p);
AxisPartition read_nodes(std::istream& is);

}  // namespace macelast
