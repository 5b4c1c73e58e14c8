#pragma once

#include "macelast/fields.hpp"
#include "macelast/grid.hpp"
#include "macelast/tensor_fields.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace macelast {

/// Lame parameters of a homogeneous isotropic medium.
struct LameParameters {
    double lambda = 1.0;
    double mu = 1.0;

    /// Throws std::invalid_argument unless both are positive and finite.
    void validate() const;

    /// lambda / (d lambda + 2 mu), the trace coefficient of the compliance
    /// tensor A sigma = (sigma - ratio tr(sigma) I) / (2 mu).
    double compliance_ratio(int dims) const { return lambda / (dims * lambda + 2.0 * mu); }
};

/// One variable family of the discrete system.
struct UnknownBlock {
    enum class Kind { kNormalStress, kShearStress, kDisplacement };

    std::string name;  // "Z11", "Z12", "Wx", ...
    Kind kind;
    int a;             // component axes; b == a for normal stress and displacement
    int b;
    GridLocation location;
    std::size_t offset;
    std::size_t count;
    std::array<std::size_t, 3> extents;  // unknown extents; 1 for absent axes
};

/// Unknown numbering: [Z11 | Z22 | (Z33) | Z12 | (Z13 | Z23) | Wx | Wy | (Wz)],
/// lexicographic (x fastest) inside each block. Displacement blocks hold only
/// indices interior along the component's normal axis; boundary values are
/// eliminated.
class UnknownMap {
public:
    explicit UnknownMap(const GridPtr& grid);

    const GridPtr& grid() const { return grid_; }
    int dims() const { return grid_->dims(); }
    std::size_t size() const { return size_; }
    std::size_t stress_size() const { return stress_size_; }
    std::size_t displacement_size() const { return size_ - stress_size_; }
    const std::vector<UnknownBlock>& blocks() const { return blocks_; }

    std::size_t normal_stress(int a, std::size_t i, std::size_t j, std::size_t k = 0) const;
    std::size_t shear_stress(int a, int b, std::size_t i, std::size_t j, std::size_t k = 0) const;
    /// Returns -1 for a boundary index along axis a.
    std::ptrdiff_t displacement(int a, std::size_t i, std::size_t j, std::size_t k = 0) const;

    /// Block containing an unknown index.
    const UnknownBlock& block_of(std::size_t unknown) const;
    /// Human-readable "Z12(3,0)" label of an unknown.
    std::string describe(std::size_t unknown) const;

    /// Flattens fields into an unknown vector (boundary displacement values are dropped).
    Eigen::VectorXd encode(const StressFields& s, const DisplacementFields& w) const;
    /// Inverse of encode; boundary displacement values are set to zero.
    void decode(const Eigen::Ref<const Eigen::VectorXd>& x, StressFields& s, DisplacementFields& w) const;

private:
    GridPtr grid_;
    std::vector<UnknownBlock> blocks_;
    std::array<std::size_t, 3> normal_block_{};
    std::array<std::size_t, 3> shear_block_{};
    std::array<std::size_t, 3> disp_block_{};
    std::size_t stress_size_ = 0;
    std::size_t size_ = 0;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, std::ptrdiff_t>;

/// Assembled MAC-E system.
///
/// Every equation is multiplied by its control volume, which makes the
/// matrix exactly symmetric with the saddle-point block structure
/// [[A, B^T], [B, 0]]: A is the stress-stress compliance block, B the
/// momentum (divergence) block.
struct MacSystem {
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
    UnknownMap map;
    LameParameters params;

    const GridPtr& grid() const { return map.grid(); }
    std::size_t size() const { return map.size(); }
};

/// Homogeneous Dirichlet MAC-E system on a 2D or 3D grid. `force` holds the
/// body force sampled at the displacement locations; only interior faces
/// enter the right-hand side.
MacSystem assemble(const GridPtr& grid, const LameParameters& params, const DisplacementFields& force);

MacSystem assemble_2d(const GridPtr& grid, const LameParameters& params, const StaggeredField& f1,
                      const StaggeredField& f2);
MacSystem assemble_3d(const GridPtr& grid, const LameParameters& params, const StaggeredField& f1,
                      const StaggeredField& f2, const StaggeredField& f3);

/// Control-volume scale of each row (cell, node/edge or face volume). Dividing
/// row r by row_scale[r] recovers the pointwise difference equations.
Eigen::VectorXd row_scales(const UnknownMap& map);

/// a_h(Z, T): compliance form with the normal part weighted in M and the
/// shear part in the node/edge norms.
double bilinear_a(const StressFields& z, const StressFields& t, const LameParameters& params);

/// b_h(T, W) = sum_a (W^a, D_a T^aa + sum_{b != a} d_b T^ab)_face_a. W must
/// vanish on its normal-axis boundaries.
double bilinear_b(const StressFields& t, const DisplacementFields& w);

/// (f, v) = sum_a (f^a, v^a)_face_a.
double load_form(const DisplacementFields& f, const DisplacementFields& v);

/// Stress whose divergence reproduces W at every interior displacement point:
/// T^aa is the running weighted sum of W^a along axis a starting from the
/// lower boundary, shear parts are zero.
StressFields lbb_witness(const DisplacementFields& w);

/// Coordinate export: header line "% rows cols nnz" then "row col value"
/// (zero based) per entry.
void write_coo(std::ostream& os, const MacSystem& sys);

}  // namespace macelast
