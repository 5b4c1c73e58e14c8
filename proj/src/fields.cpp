#include "macelast/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace macelast {

namespace {

// Bit a set <=> node-type along axis a.
unsigned pattern(GridLocation loc)
{
    switch (loc) {
    case GridLocation::kCell: return 0b000;
    case GridLocation::kNode: return 0b111;
    case GridLocation::kFaceX: return 0b001;
    case GridLocation::kFaceY: return 0b010;
    case GridLocation::kFaceZ: return 0b100;
    case GridLocation::kEdgeZ: return 0b011;
    case GridLocation::kEdgeY: return 0b101;
    case GridLocation::kEdgeX: return 0b110;
    }
    return 0;
}

GridLocation from_pattern(unsigned bits, int dims)
{
    if (dims == 2) {
        switch (bits & 0b011u) {
        case 0b00: return GridLocation::kCell;
        case 0b11: return GridLocation::kNode;
        case 0b01: return GridLocation::kFaceX;
        default: return GridLocation::kFaceY;
        }
    }
    for (auto loc : {GridLocation::kCell, GridLocation::kNode, GridLocation::kFaceX, GridLocation::kFaceY,
                     GridLocation::kFaceZ, GridLocation::kEdgeX, GridLocation::kEdgeY, GridLocation::kEdgeZ}) {
        if (pattern(loc) == bits) {
            return loc;
        }
    }
    throw std::logic_error("from_pattern: unreachable");
}

int face_normal(GridLocation loc)
{
    switch (loc) {
    case GridLocation::kFaceX: return 0;
    case GridLocation::kFaceY: return 1;
    case GridLocation::kFaceZ: return 2;
    default: return -1;
    }
}

}  // namespace

std::string_view to_string(GridLocation loc)
{
    switch (loc) {
    case GridLocation::kCell: return "CELL";
    case GridLocation::kNode: return "NODE";
    case GridLocation::kFaceX: return "FACE_X";
    case GridLocation::kFaceY: return "FACE_Y";
    case GridLocation::kFaceZ: return "FACE_Z";
    case GridLocation::kEdgeX: return "EDGE_X";
    case GridLocation::kEdgeY: return "EDGE_Y";
    case GridLocation::kEdgeZ: return "EDGE_Z";
    }
    return "?";
}

std::string norm_label(GridLocation loc, int dims)
{
    if (loc == GridLocation::kCell) {
        return "M";
    }
    if (loc == GridLocation::kNode && dims == 2) {
        return "T";
    }
    std::string s;
    for (int a = 0; a < dims; ++a) {
        s += is_node_type(loc, a) ? 'T' : 'M';
    }
    return s;
}

bool valid_for_dims(GridLocation loc, int dims)
{
    if (dims == 3) {
        return true;
    }
    if (dims == 2) {
        return loc == GridLocation::kCell || loc == GridLocation::kNode || loc == GridLocation::kFaceX ||
               loc == GridLocation::kFaceY;
    }
    return false;
}

bool is_node_type(GridLocation loc, int axis)
{
    return ((pattern(loc) >> axis) & 1u) != 0;
}

GridLocation toggle_axis(GridLocation loc, int axis, int dims)
{
    if (axis < 0 || axis >= dims || !valid_for_dims(loc, dims)) {
        throw std::invalid_argument("toggle_axis: axis or location invalid for grid dimension");
    }
    unsigned bits = pattern(loc);
    if (dims == 2 && loc == GridLocation::kNode) {
        bits = 0b011;
    }
    return from_pattern(bits ^ (1u << axis), dims);
}

GridLocation face_location(int axis)
{
    switch (axis) {
    case 0: return GridLocation::kFaceX;
    case 1: return GridLocation::kFaceY;
    case 2: return GridLocation::kFaceZ;
    default: throw std::invalid_argument("face_location: axis out of range");
    }
}

GridLocation shear_location(int a, int b, int dims)
{
    if (a == b || a < 0 || b < 0 || a >= dims || b >= dims) {
        throw std::invalid_argument("shear_location: need two distinct axes");
    }
    if (dims == 2) {
        return GridLocation::kNode;
    }
    return from_pattern((1u << a) | (1u << b), 3);
}

StaggeredField::StaggeredField(GridPtr grid, GridLocation loc) : grid_(std::move(grid)), loc_(loc)
{
    if (!grid_) {
        throw std::invalid_argument("StaggeredField: null grid");
    }
    if (!valid_for_dims(loc_, grid_->dims())) {
        throw std::invalid_argument("StaggeredField: location " + std::string(to_string(loc_)) +
                                    " is not defined on a " + std::to_string(grid_->dims()) + "D grid");
    }
    std::size_t total = 1;
    for (int a = 0; a < grid_->dims(); ++a) {
        const std::size_t n = grid_->cells(a);
        extents_[static_cast<std::size_t>(a)] = is_node_type(loc_, a) ? n + 1 : n;
        total *= extents_[static_cast<std::size_t>(a)];
    }
    values_.assign(total, 0.0);
}

std::array<std::size_t, 3> StaggeredField::multi_index(std::size_t flat) const
{
    const std::size_t i = flat % extents_[0];
    flat /= extents_[0];
    const std::size_t j = flat % extents_[1];
    return {i, j, flat / extents_[1]};
}

double StaggeredField::coordinate(int axis, std::size_t idx) const
{
    const auto& p = grid_->axis(axis);
    return is_node_type(loc_, axis) ? p.node(idx) : p.midpoint(idx);
}

Point StaggeredField::point(std::size_t flat) const
{
    const auto mi = multi_index(flat);
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < dims(); ++a) {
        x[static_cast<std::size_t>(a)] = coordinate(a, mi[static_cast<std::size_t>(a)]);
    }
    return x;
}

bool StaggeredField::compatible(const StaggeredField& other) const
{
    return loc_ == other.loc_ && (grid_ == other.grid_ || *grid_ == *other.grid_);
}

namespace {

void require_compatible(const StaggeredField& a, const StaggeredField& b, const char* what)
{
    if (!a.compatible(b)) {
        throw std::invalid_argument(std::string(what) + ": fields differ in grid or location (" +
                                    std::string(to_string(a.location())) + " vs " +
                                    std::string(to_string(b.location())) + ")");
    }
}

}  // namespace

StaggeredField& StaggeredField::operator+=(const StaggeredField& other)
{
    require_compatible(*this, other, "operator+=");
    for (std::size_t n = 0; n < values_.size(); ++n) {
        values_[n] += other.values_[n];
    }
    return *this;
}

StaggeredField& StaggeredField::operator-=(const StaggeredField& other)
{
    require_compatible(*this, other, "operator-=");
    for (std::size_t n = 0; n < values_.size(); ++n) {
        values_[n] -= other.values_[n];
    }
    return *this;
}

StaggeredField& StaggeredField::operator*=(double s)
{
    for (double& v : values_) {
        v *= s;
    }
    return *this;
}

StaggeredField operator+(StaggeredField a, const StaggeredField& b) { return a += b; }
StaggeredField operator-(StaggeredField a, const StaggeredField& b) { return a -= b; }
StaggeredField operator*(double s, StaggeredField a) { return a *= s; }

StaggeredField zeros(const GridPtr& grid, GridLocation loc)
{
    return StaggeredField(grid, loc);
}

StaggeredField sample(const GridPtr& grid, GridLocation loc, const ScalarFunction& f)
{
    StaggeredField out(grid, loc);
    for (std::size_t n = 0; n < out.size(); ++n) {
        out[n] = f(out.point(n));
    }
    return out;
}

double weight(const StaggeredField& a, std::size_t flat)
{
    const auto mi = a.multi_index(flat);
    const int normal = face_normal(a.location());
    double w = 1.0;
    for (int ax = 0; ax < a.dims(); ++ax) {
        const auto& p = a.grid()->axis(ax);
        const std::size_t idx = mi[static_cast<std::size_t>(ax)];
        if (is_node_type(a.location(), ax)) {
            if (ax == normal && (idx == 0 || idx == p.cells())) {
                return 0.0;
            }
            w *= p.dual_width(idx);
        } else {
            w *= p.cell_width(idx);
        }
    }
    return w;
}

double inner_product(const StaggeredField& a, const StaggeredField& b)
{
    require_compatible(a, b, "inner_product");
    const int dims = a.dims();
    const auto& g = *a.grid();
    const int normal = face_normal(a.location());

    // Per-axis weight tables; the face normal axis drops its two boundary
    // indices.
    std::array<std::vector<double>, 3> w;
    for (int ax = 0; ax < 3; ++ax) {
        auto& wa = w[static_cast<std::size_t>(ax)];
        if (ax >= dims) {
            wa.assign(1, 1.0);
            continue;
        }
        const auto& p = g.axis(ax);
        if (is_node_type(a.location(), ax)) {
            wa.assign(p.dual_widths().begin(), p.dual_widths().end());
            if (ax == normal) {
                wa.front() = 0.0;
                wa.back() = 0.0;
            }
        } else {
            wa.assign(p.cell_widths().begin(), p.cell_widths().end());
        }
    }

    const auto& e = a.extents();
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < e[2]; ++k) {
        for (std::size_t j = 0; j < e[1]; ++j) {
            const double wjk = w[1][j] * w[2][k];
            for (std::size_t i = 0; i < e[0]; ++i, ++n) {
                sum += w[0][i] * wjk * a[n] * b[n];
            }
        }
    }
    return sum;
}

double norm(const StaggeredField& a)
{
    return std::sqrt(inner_product(a, a));
}

double max_abs(const StaggeredField& a)
{
    double m = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
        if (weight(a, n) > 0.0) {
            m = std::max(m, std::abs(a[n]));
        }
    }
    return m;
}

void write_csv(std::ostream& os, const StaggeredField& a)
{
    static constexpr const char* kIdx[] = {"i", "j", "k"};
    static constexpr const char* kCoord[] = {"x", "y", "z"};
    const int d = a.dims();
    for (int ax = 0; ax < d; ++ax) {
        os << kIdx[ax] << ',';
    }
    for (int ax = 0; ax < d; ++ax) {
        os << kCoord[ax] << ',';
    }
    os << "value\n";

    const auto old = os.precision(std::numeric_limits<double>::max_digits10);
    for (std::size_t n = 0; n < a.size(); ++n) {
        const auto mi = a.multi_index(n);
        const auto x = a.point(n);
        for (int ax = 0; ax < d; ++ax) {
            os << mi[static_cast<std::size_t>(ax)] << ',';
        }
        for (int ax = 0; ax < d; ++ax) {
            os << x[static_cast<std::size_t>(ax)] << ',';
        }
        os << a[n] << '\n';
    }
    os.precision(old);
}

}  // namespace macelast
