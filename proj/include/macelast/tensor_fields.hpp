#pragma once

#include "macelast/fields.hpp"

#include <cstddef>
#include <vector>

namespace macelast {

/// Position of the shear component coupling axes a != b in StressFields::shear:
/// (x,y) -> 0, (x,z) -> 1, (y,z) -> 2.
std::size_t shear_slot(int a, int b);

/// Discrete symmetric stress: normal components at cell centres, one shear
/// component per axis pair on its node (2D) or edge (3D) family. sigma^ab and
/// sigma^ba share a single field.
struct StressFields {
    std::vector<StaggeredField> normal;
    std::vector<StaggeredField> shear;

    static StressFields zeros(const GridPtr& grid);

    int dims() const { return static_cast<int>(normal.size()); }
    StaggeredField& shear_component(int a, int b) { return shear[shear_slot(a, b)]; }
    const StaggeredField& shear_component(int a, int b) const { return shear[shear_slot(a, b)]; }
};

/// Discrete displacement: component a on the face family normal to axis a.
/// Boundary entries along the normal axis are stored and must stay zero for
/// the homogeneous Dirichlet problem.
struct DisplacementFields {
    std::vector<StaggeredField> comp;

    static DisplacementFields zeros(const GridPtr& grid);

    int dims() const { return static_cast<int>(comp.size()); }
};

/// ||sigma||^2 = sum of the M norms of the normal parts plus the T (edge)
/// norms of the shear parts, each shear component counted once.
double norm(const StressFields& s);
/// Norm of the full symmetric tensor: shear parts counted for both sigma^ab
/// and sigma^ba, ||s||^2 = sum_a ||s^aa||^2 + 2 sum_{a<b} ||s^ab||^2.
double tensor_norm(const StressFields& s);
double norm(const DisplacementFields& w);

}  // namespace macelast
