#pragma once

#include "macelast/elasticity.hpp"
#include "macelast/fields.hpp"
#include "macelast/grid.hpp"
#include "macelast/solve.hpp"
#include "macelast/tensor_fields.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace macelast {

/// c * exp(rate x) * x^power * sin^sin_power(freq x) * cos^cos_power(freq x)
struct Monomial {
    double coef = 0.0;
    double rate = 0.0;
    int power = 0;
    int sin_power = 0;
    int cos_power = 0;
    double freq = 0.0;

    bool has_trig() const { return sin_power != 0 || cos_power != 0; }
    double operator()(double x) const;
};

/// Finite sum of monomials in one variable, closed under differentiation
/// and under products of factors that share one trigonometric frequency.
class Function1D {
public:
    Function1D() = default;
    explicit Function1D(std::vector<Monomial> terms);

    static Function1D constant(double c);
    /// sum_k coeffs[k] x^k
    static Function1D polynomial(const std::vector<double>& coeffs);
    static Function1D trig(double freq, int sin_power, int cos_power, double coef = 1.0);
    static Function1D exponential(double rate, double coef = 1.0);

    double operator()(double x) const;
    Function1D derivative(int order = 1) const;
    const std::vector<Monomial>& terms() const { return terms_; }

    friend Function1D operator+(const Function1D& f, const Function1D& g);
    friend Function1D operator-(const Function1D& f, const Function1D& g);
    /// Throws std::invalid_argument when two trigonometric monomials have
    /// different frequencies.
    friend Function1D operator*(const Function1D& f, const Function1D& g);
    friend Function1D operator*(double s, const Function1D& f);

private:
    void simplify();
    std::vector<Monomial> terms_;
};

/// f_x(x) f_y(y) [f_z(z)]
struct SeparableTerm {
    std::array<Function1D, 3> factor{Function1D::constant(1.0), Function1D::constant(1.0),
                                     Function1D::constant(1.0)};
};

using Multi = std::array<int, 3>;
using Tensor3 = std::array<std::array<double, 3>, 3>;

/// Closed-form displacement field u = sum of separable terms per component,
/// with every partial derivative available exactly.
class ManufacturedCase {
public:
    static constexpr int kMaxDerivative = 4;

    ManufacturedCase(std::string name, int dims, LameParameters params,
                     std::vector<std::vector<SeparableTerm>> displacement);

    /// u^x = sin(2 pi y)(cos(2 pi x) - 1) + s/(1+lambda),
    /// u^y = sin(2 pi x)(1 - cos(2 pi y)) + s/(1+lambda), s = sin(pi x) sin(pi y).
    static ManufacturedCase example1(double lambda, double mu = 1.0);
    /// Polynomial divergence-free part plus a 1/lambda perturbation.
    static ManufacturedCase example2(double lambda, double mu = 1.0);
    /// 3D trigonometric case, amplitude 9 pi^2 (1 + 1/lambda).
    static ManufacturedCase example3(double lambda, double mu = 1.0);
    /// "example1", "example2" or "example3"; std::invalid_argument otherwise.
    static ManufacturedCase by_name(const std::string& name, double lambda, double mu = 1.0);

    const std::string& name() const { return name_; }
    int dims() const { return dims_; }
    const LameParameters& params() const { return params_; }

    /// Partial derivative `deriv` of u^a at p.
    double displacement(int a, const Point& p, const Multi& deriv = {0, 0, 0}) const;
    /// (d_a u^b + d_b u^a) / 2
    double strain(int a, int b, const Point& p, const Multi& deriv = {0, 0, 0}) const;
    /// 2 mu eps_ab + lambda tr(eps) delta_ab, differentiated by `deriv`.
    double stress(int a, int b, const Point& p, const Multi& deriv = {0, 0, 0}) const;

private:
    std::string name_;
    int dims_;
    LameParameters params_;
    // table_[a][term][axis][order]
    std::vector<std::vector<std::array<std::array<Function1D, kMaxDerivative + 1>, 3>>> table_;
};

/// sigma(u) at p; entries beyond dims are zero.
Tensor3 exact_stress(const ManufacturedCase& c, const Point& p);
/// f = div sigma at p.
std::array<double, 3> body_force(const ManufacturedCase& c, const Point& p);
/// A sigma with the compliance of the case parameters.
Tensor3 apply_compliance(const Tensor3& sigma, const LameParameters& params, int dims);

/// Exact values sampled at the staggered locations; displacement boundary
/// entries along each normal axis are set to zero.
StressFields exact_stress_fields(const ManufacturedCase& c, const GridPtr& grid);
DisplacementFields exact_displacement_fields(const ManufacturedCase& c, const GridPtr& grid);
DisplacementFields body_force_fields(const ManufacturedCase& c, const GridPtr& grid);

/// Corrected interpolants: normal stresses sigma^aa - sum_b (h_b^2/8) d_b^2 sigma^aa
/// with the local cell widths, shear stresses unchanged, displacement
/// u^a - sum_{b != a} (h_b^2/8) d_b^2 u^a.
struct Interpolant {
    StressFields stress;
    DisplacementFields displacement;
};
Interpolant interpolant_fields(const ManufacturedCase& c, const GridPtr& grid);

struct ComponentError {
    std::string component;  // "Wx", "Z11", "Z12", ...
    std::string norm;       // "TM", "M", "TTM", ...
    double error = 0.0;
};

struct ErrorReport {
    std::vector<ComponentError> vs_exact;
    std::vector<ComponentError> vs_interpolant;

    /// Throws std::out_of_range for an unknown component.
    double exact(const std::string& component) const;
    double interpolant(const std::string& component) const;
};

/// Component order: Wx, Wy, [Wz], Z11, Z22, [Z33], Z12, [Z13, Z23].
std::vector<std::string> component_names(int dims);

/// Discrete norms of the differences to the exact samples and to the
/// interpolants. Throws std::invalid_argument when the fields do not live
/// on `grid`.
ErrorReport error_report(const StressFields& z, const DisplacementFields& w, const ManufacturedCase& c,
                         const GridPtr& grid);
ErrorReport error_report(const Solution& sol, const MacSystem& sys, const ManufacturedCase& c);

/// Assembles the system of a case on a grid.
MacSystem assemble_case(const ManufacturedCase& c, const GridPtr& grid);

struct MeshMode {
    enum class Kind { kUniform, kPerturbed };
    Kind kind = Kind::kUniform;
    std::uint64_t seed = 0;
    double amplitude = 0.3;

    static MeshMode uniform() { return {}; }
    static MeshMode perturbed(std::uint64_t seed, double amplitude = 0.3) { return {Kind::kPerturbed, seed, amplitude}; }
    std::string describe() const;
};

/// Level-0 grid on the unit square/cube. Perturbed axes use seed + axis.
GridPtr base_grid(int dims, std::size_t cells, const MeshMode& mode);

struct LevelResult {
    int level = 0;
    std::array<std::size_t, 3> cells{1, 1, 1};
    bool ok = false;
    std::string failure;  // solver diagnostic when !ok
    double residual = 0.0;
    int iterations = 0;
    std::string backend;
    std::size_t unknowns = 0;
    double seconds = 0.0;
    ErrorReport errors;
};

class ConvergenceReport {
public:
    enum class Target { kExact, kInterpolant };

    std::string case_name;
    int dims = 2;
    LameParameters params;
    MeshMode mode;
    std::vector<LevelResult> levels;

    bool ok() const;
    std::optional<double> error(const std::string& component, std::size_t level, Target t = Target::kExact) const;
    /// log2(e[level-1] / e[level]); empty for level 0 or a failed level.
    std::optional<double> rate(const std::string& component, std::size_t level, Target t = Target::kExact) const;
};

/// Solves the case on base_grid(...) and `levels - 1` successive bisections.
/// A failing level is recorded and the remaining levels still run. Up to
/// `threads` levels are solved concurrently.
ConvergenceReport convergence_study(const ManufacturedCase& c, std::size_t base_cells, int levels,
                                    const MeshMode& mode, const SolverOptions& options = {}, int threads = 1);

/// One row per level per component:
/// level,nx,ny[,nz],component,norm,error,rate,residual
void write_csv(std::ostream& os, const ConvergenceReport& r,
               ConvergenceReport::Target t = ConvergenceReport::Target::kExact);
/// Displacement, normal-stress and shear-stress tables laid out like the
/// usual "n x n | error | Rate | ..." convergence tables.
void write_markdown(std::ostream& os, const ConvergenceReport& r,
                    ConvergenceReport::Target t = ConvergenceReport::Target::kExact);

}  // namespace macelast
