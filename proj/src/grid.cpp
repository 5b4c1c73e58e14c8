#include "macelast/grid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

namespace macelast {

AxisPartition::AxisPartition(std::vector<double> nodes) : nodes_(std::move(nodes))
{
    if (nodes_.size() < 2) {
        throw std::invalid_argument("AxisPartition: need at least one cell");
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!std::isfinite(nodes_[i])) {
            throw std::invalid_argument("AxisPartition: non-finite node coordinate");
        }
        if (i > 0 && !(nodes_[i] > nodes_[i - 1])) {
            throw std::invalid_argument("AxisPartition: nodes must be strictly increasing (index " +
                                        std::to_string(i) + ")");
        }
    }

    const std::size_t n = nodes_.size() - 1;
    cell_widths_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        cell_widths_[i] = nodes_[i + 1] - nodes_[i];
    }
    dual_widths_.resize(n + 1);
    dual_widths_[0] = 0.5 * cell_widths_[0];
    dual_widths_[n] = 0.5 * cell_widths_[n - 1];
    for (std::size_t i = 1; i < n; ++i) {
        dual_widths_[i] = 0.5 * (cell_widths_[i - 1] + cell_widths_[i]);
    }
}

double AxisPartition::min_cell_width() const
{
    return *std::min_element(cell_widths_.begin(), cell_widths_.end());
}

double AxisPartition::max_cell_width() const
{
    return *std::max_element(cell_widths_.begin(), cell_widths_.end());
}

namespace {

void check_interval(std::size_t cells, double lower, double upper)
{
    if (cells == 0) {
        throw std::invalid_argument("axis: cell count must be at least 1");
    }
    if (!(lower < upper)) {
        throw std::invalid_argument("axis: lower end must be less than upper end");
    }
}

// Uniform in (-1, 1) from the top 53 bits of a 64-bit draw. Avoids
// std::uniform_real_distribution so the sequence is identical across
// standard library implementations.
double symmetric_unit(std::mt19937_64& gen)
{
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;  // [0, 1)
    return 2.0 * u - 1.0;
}

}  // namespace

AxisPartition uniform_axis(std::size_t cells, double lower, double upper)
{
    check_interval(cells, lower, upper);
    std::vector<double> nodes(cells + 1);
    const double width = upper - lower;
    for (std::size_t i = 0; i <= cells; ++i) {
        nodes[i] = lower + width * static_cast<double>(i) / static_cast<double>(cells);
    }
    nodes[cells] = upper;
    return AxisPartition(std::move(nodes));
}

AxisPartition perturbed_axis(std::size_t cells, double lower, double upper, double amplitude,
                             std::uint64_t seed)
{
    check_interval(cells, lower, upper);
    if (!(amplitude >= 0.0) || !(amplitude < 0.5)) {
        throw std::invalid_argument("perturbed_axis: amplitude must lie in [0, 0.5)");
    }
    const AxisPartition base = uniform_axis(cells, lower, upper);
    std::vector<double> nodes(base.nodes().begin(), base.nodes().end());
    const double spacing = (upper - lower) / static_cast<double>(cells);

    std::mt19937_64 gen(seed);
    for (std::size_t i = 1; i < cells; ++i) {
        nodes[i] += symmetric_unit(gen) * amplitude * spacing;
    }
    return AxisPartition(std::move(nodes));
}

AxisPartition refine_axis(const AxisPartition& p)
{
    const std::size_t n = p.cells();
    std::vector<double> nodes(2 * n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        nodes[2 * i] = p.node(i);
        nodes[2 * i + 1] = p.midpoint(i);
    }
    nodes[2 * n] = p.node(n);
    return AxisPartition(std::move(nodes));
}

TensorGrid::TensorGrid(std::vector<AxisPartition> axes) : axes_(std::move(axes))
{
    if (axes_.size() != 2 && axes_.size() != 3) {
        throw std::invalid_argument("TensorGrid: only 2 or 3 dimensions are supported");
    }
}

GridPtr make_grid(std::vector<AxisPartition> axes)
{
    return std::make_shared<const TensorGrid>(std::move(axes));
}

GridPtr uniform_grid(int dims, std::size_t cells, double lower, double upper)
{
    if (dims != 2 && dims != 3) {
        throw std::invalid_argument("uniform_grid: dims must be 2 or 3");
    }
    std::vector<AxisPartition> axes(static_cast<std::size_t>(dims), uniform_axis(cells, lower, upper));
    return make_grid(std::move(axes));
}

GridPtr refine(const TensorGrid& g)
{
    std::vector<AxisPartition> axes;
    axes.reserve(g.axes().size());
    for (const auto& a : g.axes()) {
        axes.push_back(refine_axis(a));
    }
    return make_grid(std::move(axes));
}

double regularity_ratio(const TensorGrid& g)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& a : g.axes()) {
        lo = std::min(lo, a.min_cell_width());
        hi = std::max(hi, a.max_cell_width());
    }
    return lo / hi;
}

void write_nodes(std::ostream& os, const AxisPartition& p)
{
    const auto old = os.precision(std::numeric_limits<double>::max_digits10);
    for (double x : p.nodes()) {
        os << x << '\n';
    }
    os.precision(old);
}

AxisPartition read_nodes(std::istream& is)
{
    std::vector<double> nodes;
    std::string line;
    while (std::getline(is, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(line.substr(first), &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("read_nodes: cannot parse '" + line + "'");
        }
        nodes.push_back(v);
    }
    return AxisPartition(std::move(nodes));
}

}  // namespace macelast
