#pragma once

#include "macelast/grid.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace macelast {

/// Staggered location families. Along each axis a family is either
/// node-type (integer indices 0..n) or cell-type (half indices, 0..n-1).
///
///   kCell   M    (i+1/2, j+1/2[, k+1/2])   normal stresses
///   kNode   T    (i, j[, k])               2D shear stress
///   kFaceX  TM   (i, j+1/2[, k+1/2])       x displacement
///   kFaceY  MT   (i+1/2, j[, k+1/2])       y displacement
///   kFaceZ  MMT  (i+1/2, j+1/2, k)         z displacement (3D)
///   kEdgeZ  TTM  (i, j, k+1/2)             sigma^12 (3D)
///   kEdgeY  TMT  (i, j+1/2, k)             sigma^13 (3D)
///   kEdgeX  MTT  (i+1/2, j, k)             sigma^23 (3D)
enum class GridLocation { kCell, kNode, kFaceX, kFaceY, kFaceZ, kEdgeX, kEdgeY, kEdgeZ };

std::string_view to_string(GridLocation loc);

/// Norm family label of a location ("M", "T", "TM", "MTT", ...).
std::string norm_label(GridLocation loc, int dims);

bool valid_for_dims(GridLocation loc, int dims);
bool is_node_type(GridLocation loc, int axis);

/// The family obtained from `loc` by toggling the node/cell type of one axis.
GridLocation toggle_axis(GridLocation loc, int axis, int dims);

/// Face family normal to `axis`.
GridLocation face_location(int axis);

/// Edge family carrying the shear component coupling axes a and b.
GridLocation shear_location(int a, int b, int dims);

using Point = std::array<double, 3>;
using ScalarFunction = std::function<double(const Point&)>;

/// Values attached to one location family of a tensor grid, stored
/// lexicographically with x fastest.
class StaggeredField {
public:
    StaggeredField(GridPtr grid, GridLocation loc);

    const GridPtr& grid() const { return grid_; }
    GridLocation location() const { return loc_; }
    int dims() const { return grid_->dims(); }

    /// Index extent along an axis: n + 1 for node-type, n for cell-type,
    /// 1 for the absent third axis of a 2D grid.
    std::size_t extent(int axis) const { return extents_[static_cast<std::size_t>(axis)]; }
    const std::array<std::size_t, 3>& extents() const { return extents_; }
    std::size_t size() const { return values_.size(); }

    std::size_t index(std::size_t i, std::size_t j, std::size_t k = 0) const
    {
        return i + extents_[0] * (j + extents_[1] * k);
    }
    std::array<std::size_t, 3> multi_index(std::size_t flat) const;

    double& operator()(std::size_t i, std::size_t j, std::size_t k = 0) { return values_[index(i, j, k)]; }
    double operator()(std::size_t i, std::size_t j, std::size_t k = 0) const { return values_[index(i, j, k)]; }
    double& operator[](std::size_t flat) { return values_[flat]; }
    double operator[](std::size_t flat) const { return values_[flat]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    /// Physical coordinate of index `idx` along `axis`.
    double coordinate(int axis, std::size_t idx) const;
    Point point(std::size_t flat) const;

    bool compatible(const StaggeredField& other) const;

    StaggeredField& operator+=(const StaggeredField& other);
    StaggeredField& operator-=(const StaggeredField& other);
    StaggeredField& operator*=(double s);

private:
    GridPtr grid_;
    GridLocation loc_;
    std::array<std::size_t, 3> extents_{1, 1, 1};
    std::vector<double> values_;
};

StaggeredField operator+(StaggeredField a, const StaggeredField& b);
StaggeredField operator-(StaggeredField a, const StaggeredField& b);
StaggeredField operator*(double s, StaggeredField a);

StaggeredField zeros(const GridPtr& grid, GridLocation loc);
StaggeredField sample(const GridPtr& grid, GridLocation loc, const ScalarFunction& f);

/// Quadrature weight of one flat index in the discrete l2 inner product of
/// its family. Zero for boundary indices along the normal axis of a face
/// family, whose inner products run over interior indices only.
double weight(const StaggeredField& a, std::size_t flat);

/// Weighted discrete l2 inner product. Throws std::invalid_argument when the
/// operands do not share grid and location.
double inner_product(const StaggeredField& a, const StaggeredField& b);
double norm(const StaggeredField& a);

/// Largest absolute value over the indices that carry positive weight.
double max_abs(const StaggeredField& a);

/// Columns: index tuple, coordinates, value.
void write_csv(std::ostream& os, const StaggeredField& a);

}  // namespace macelast
