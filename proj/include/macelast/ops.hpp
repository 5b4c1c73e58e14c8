#pragma once

#include "macelast/fields.hpp"
#include "macelast/tensor_fields.hpp"

#include <span>
#include <string>
#include <vector>

namespace macelast {

/// [d phi]_{i+1/2} = (phi_{i+1} - phi_i) / h_{i+1/2} along `axis`, applied
/// independently on every transverse index. The input must be node-type
/// along `axis`; the result is cell-type there.
StaggeredField forward_diff(const StaggeredField& a, int axis);

/// [D phi]_i = (phi_{i+1/2} - phi_{i-1/2}) / h_i in the interior and the
/// half-spacing quotients (phi_{1/2} - phi_0) / h_0, (phi_n - phi_{n-1/2}) / h_n
/// at the two ends, where phi_0 and phi_n come from the boundary traces.
///
/// Each trace lists one value per transverse index, lexicographic over the
/// remaining axes with the lowest axis fastest. The input must be cell-type
/// along `axis`; the result is node-type there, boundary indices included.
StaggeredField dual_diff(const StaggeredField& a, int axis, std::span<const double> trace_low,
                         std::span<const double> trace_high);

/// dual_diff with homogeneous (zero) traces.
StaggeredField dual_diff(const StaggeredField& a, int axis);

/// Number of transverse indices a trace for dual_diff(a, axis, ...) must have.
std::size_t trace_size(const StaggeredField& a, int axis);

/// Discrete summation-by-parts identity between the d and D quotients.
///
///   kNormalDualFirst   (D_a tau^aa, v^a)_face + (tau^aa, d_a v^a)_M
///   kNormalForwardFirst (d_a v^a, tau^aa)_M + (v^a, D_a tau^aa)_face
///   kShear             (D_a v^b + D_b v^a, tau^ab)_edge
///                        + (v^b, d_a tau^ab)_face_b + (v^a, d_b tau^ab)_face_a
///
/// Each expression vanishes in exact arithmetic when v has zero boundary
/// values.
struct SbpIdentity {
    enum class Kind { kNormalDualFirst, kNormalForwardFirst, kShear };
    Kind kind;
    int a;
    int b;  // only used by kShear

    std::string name() const;
};

/// All identities for a grid dimension: 5 in 2D, 9 in 3D.
std::vector<SbpIdentity> sbp_identities(int dims);

/// Evaluates the identity; the exact value is 0. Throws std::domain_error
/// when a displacement component has a nonzero boundary value.
double adjoint_defect(const SbpIdentity& id, const DisplacementFields& v, const StressFields& t);

/// Operand scale for relative defect checks: the product of the norms of the
/// fields entering the identity.
double adjoint_scale(const SbpIdentity& id, const DisplacementFields& v, const StressFields& t);

/// Throws std::domain_error if any component has a nonzero value on its
/// normal-axis boundary.
void require_zero_boundary(const DisplacementFields& v);

}  // namespace macelast
