#include "macelast/mms.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace macelast {

namespace {

double ipow(double x, int n)
{
    double r = 1.0;
    for (int i = 0; i < n; ++i) {
        r *= x;
    }
    return r;
}

}  // namespace

double Monomial::operator()(double x) const
{
    double v = coef;
    if (rate != 0.0) v *= std::exp(rate * x);
    if (power != 0) v *= ipow(x, power);
    if (sin_power != 0) v *= ipow(std::sin(freq * x), sin_power);
    if (cos_power != 0) v *= ipow(std::cos(freq * x), cos_power);
    return v;
}

Function1D::Function1D(std::vector<Monomial> terms) : terms_(std::move(terms))
{
    simplify();
}

Function1D Function1D::constant(double c)
{
    return Function1D({Monomial{c}});
}

Function1D Function1D::polynomial(const std::vector<double>& coeffs)
{
    std::vector<Monomial> t;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        t.push_back(Monomial{coeffs[k], 0.0, static_cast<int>(k)});
    }
    return Function1D(std::move(t));
}

Function1D Function1D::trig(double freq, int sin_power, int cos_power, double coef)
{
    if (sin_power < 0 || cos_power < 0) {
        throw std::invalid_argument("Function1D::trig: negative power");
    }
    return Function1D({Monomial{coef, 0.0, 0, sin_power, cos_power, freq}});
}

Function1D Function1D::exponential(double rate, double coef)
{
    return Function1D({Monomial{coef, rate}});
}

double Function1D::operator()(double x) const
{
    double s = 0.0;
    for (const auto& m : terms_) {
        s += m(x);
    }
    return s;
}

Function1D Function1D::derivative(int order) const
{
    if (order < 0) {
        throw std::invalid_argument("Function1D::derivative: negative order");
    }
    Function1D f = *this;
    for (int o = 0; o < order; ++o) {
        std::vector<Monomial> out;
        for (const auto& m : f.terms_) {
            if (m.rate != 0.0) {
                Monomial d = m;
                d.coef *= m.rate;
                out.push_back(d);
            }
            if (m.power > 0) {
                Monomial d = m;
                d.coef *= m.power;
                d.power -= 1;
                out.push_back(d);
            }
            if (m.sin_power > 0) {
                Monomial d = m;
                d.coef *= m.sin_power * m.freq;
                d.sin_power -= 1;
                d.cos_power += 1;
                out.push_back(d);
            }
            if (m.cos_power > 0) {
                Monomial d = m;
                d.coef *= -m.cos_power * m.freq;
                d.sin_power += 1;
                d.cos_power -= 1;
                out.push_back(d);
            }
        }
        f = Function1D(std::move(out));
    }
    return f;
}

void Function1D::simplify()
{
    using Key = std::tuple<double, int, int, int, double>;
    std::map<Key, double> acc;
    for (auto m : terms_) {
        if (!m.has_trig()) {
            m.freq = 0.0;
        }
        acc[Key{m.rate, m.power, m.sin_power, m.cos_power, m.freq}] += m.coef;
    }
    terms_.clear();
    for (const auto& [k, c] : acc) {
        if (c != 0.0) {
            terms_.push_back(Monomial{c, std::get<0>(k), std::get<1>(k), std::get<2>(k), std::get<3>(k), std::get<4>(k)});
        }
    }
}

Function1D operator+(const Function1D& f, const Function1D& g)
{
    std::vector<Monomial> t = f.terms_;
    t.insert(t.end(), g.terms_.begin(), g.terms_.end());
    return Function1D(std::move(t));
}

Function1D operator-(const Function1D& f, const Function1D& g)
{
    return f + (-1.0) * g;
}

Function1D operator*(double s, const Function1D& f)
{
    std::vector<Monomial> t = f.terms_;
    for (auto& m : t) {
        m.coef *= s;
    }
    return Function1D(std::move(t));
}

Function1D operator*(const Function1D& f, const Function1D& g)
{
    std::vector<Monomial> t;
    for (const auto& a : f.terms_) {
        for (const auto& b : g.terms_) {
            if (a.has_trig() && b.has_trig() && a.freq != b.freq) {
                throw std::invalid_argument("Function1D: product of trigonometric factors with different frequencies");
            }
            t.push_back(Monomial{a.coef * b.coef, a.rate + b.rate, a.power + b.power, a.sin_power + b.sin_power,
                                 a.cos_power + b.cos_power, a.has_trig() ? a.freq : b.freq});
        }
    }
    return Function1D(std::move(t));
}

ManufacturedCase::ManufacturedCase(std::string name, int dims, LameParameters params,
                                   std::vector<std::vector<SeparableTerm>> displacement)
    : name_(std::move(name)), dims_(dims), params_(params)
{
    if (dims != 2 && dims != 3) {
        throw std::invalid_argument("ManufacturedCase: dims must be 2 or 3");
    }
    params_.validate();
    if (displacement.size() != static_cast<std::size_t>(dims)) {
        throw std::invalid_argument("ManufacturedCase: need one displacement component per axis");
    }
    table_.resize(displacement.size());
    for (std::size_t a = 0; a < displacement.size(); ++a) {
        for (const auto& term : displacement[a]) {
            auto& row = table_[a].emplace_back();
            for (std::size_t ax = 0; ax < 3; ++ax) {
                row[ax][0] = term.factor[ax];
                for (int o = 1; o <= kMaxDerivative; ++o) {
                    row[ax][static_cast<std::size_t>(o)] = row[ax][static_cast<std::size_t>(o - 1)].derivative();
                }
            }
        }
    }
}

ManufacturedCase ManufacturedCase::example1(double lambda, double mu)
{
    constexpr double pi = std::numbers::pi;
    const double eps = 1.0 / (1.0 + lambda);
    const auto one = Function1D::constant(1.0);
    SeparableTerm s;  // eps sin(pi x) sin(pi y)
    s.factor = {Function1D::trig(pi, 1, 0, eps), Function1D::trig(pi, 1, 0), one};
    SeparableTerm ux;
    ux.factor = {Function1D::trig(2 * pi, 0, 1) - one, Function1D::trig(2 * pi, 1, 0), one};
    SeparableTerm uy;
    uy.factor = {Function1D::trig(2 * pi, 1, 0), one - Function1D::trig(2 * pi, 0, 1), one};
    return ManufacturedCase("example1", 2, {lambda, mu}, {{ux, s}, {uy, s}});
}

ManufacturedCase ManufacturedCase::example2(double lambda, double mu)
{
    constexpr double pi = std::numbers::pi;
    const auto one = Function1D::constant(1.0);
    const auto x2_1mx2 = Function1D::polynomial({0, 0, 1, -2, 1});   // x^2 (1-x)^2
    const auto x_1mx_1m2x = Function1D::polynomial({0, 1, -3, 2});   // x (1-x)(1-2x)
    const auto x_1mx = Function1D::polynomial({0, 1, -1});           // x (1-x)
    SeparableTerm a;
    a.factor = {x2_1mx2, x_1mx_1m2x, one};
    SeparableTerm b;
    b.factor = {(1.0 / lambda) * (Function1D::exponential(1.0) * x_1mx), Function1D::exponential(-1.0) * x_1mx, one};
    SeparableTerm c;
    c.factor = {(-1.0) * x_1mx_1m2x, x2_1mx2, one};
    SeparableTerm d;
    d.factor = {Function1D::trig(pi, 1, 0, 1.0 / lambda), Function1D::trig(pi, 1, 0), one};
    return ManufacturedCase("example2", 2, {lambda, mu}, {{a, b}, {c, d}});
}

ManufacturedCase ManufacturedCase::example3(double lambda, double mu)
{
    constexpr double pi = std::numbers::pi;
    const double amp = 9.0 * pi * pi * (1.0 + 1.0 / lambda);
    const auto lead = Function1D::trig(pi, 3, 0);   // sin^3
    const auto side = Function1D::trig(pi, 2, 1);   // sin^2 cos
    SeparableTerm ux;
    ux.factor = {amp * lead, side, side};
    SeparableTerm uy;
    uy.factor = {amp * side, lead, side};
    SeparableTerm uz;
    uz.factor = {(-2.0 * amp) * side, side, lead};
    return ManufacturedCase("example3", 3, {lambda, mu}, {{ux}, {uy}, {uz}});
}

ManufacturedCase ManufacturedCase::by_name(const std::string& name, double lambda, double mu)
{
    if (name == "example1") return example1(lambda, mu);
    if (name == "example2") return example2(lambda, mu);
    if (name == "example3") return example3(lambda, mu);
    throw std::invalid_argument("unknown case '" + name + "' (expected example1, example2 or example3)");
}

double ManufacturedCase::displacement(int a, const Point& p, const Multi& deriv) const
{
    if (a < 0 || a >= dims_) {
        throw std::invalid_argument("ManufacturedCase::displacement: component out of range");
    }
    for (int ax = 0; ax < 3; ++ax) {
        const int o = deriv[static_cast<std::size_t>(ax)];
        if (o < 0 || o > kMaxDerivative || (ax >= dims_ && o != 0)) {
            throw std::invalid_argument("ManufacturedCase::displacement: unsupported derivative order");
        }
    }
    double sum = 0.0;
    for (const auto& term : table_[static_cast<std::size_t>(a)]) {
        double v = 1.0;
        for (int ax = 0; ax < dims_; ++ax) {
            const auto axu = static_cast<std::size_t>(ax);
            v *= term[axu][static_cast<std::size_t>(deriv[axu])](p[axu]);
        }
        sum += v;
    }
    return sum;
}

namespace {

Multi bump(Multi d, int axis)
{
    d[static_cast<std::size_t>(axis)] += 1;
    return d;
}

}  // namespace

double ManufacturedCase::strain(int a, int b, const Point& p, const Multi& deriv) const
{
    return 0.5 * (displacement(a, p, bump(deriv, b)) + displacement(b, p, bump(deriv, a)));
}

double ManufacturedCase::stress(int a, int b, const Point& p, const Multi& deriv) const
{
    double s = 2.0 * params_.mu * strain(a, b, p, deriv);
    if (a == b) {
        double div = 0.0;
        for (int c = 0; c < dims_; ++c) {
            div += displacement(c, p, bump(deriv, c));
        }
        s += params_.lambda * div;
    }
    return s;
}

Tensor3 exact_stress(const ManufacturedCase& c, const Point& p)
{
    Tensor3 s{};
    for (int a = 0; a < c.dims(); ++a) {
        for (int b = 0; b < c.dims(); ++b) {
            s[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = c.stress(a, b, p);
        }
    }
    return s;
}

std::array<double, 3> body_force(const ManufacturedCase& c, const Point& p)
{
    std::array<double, 3> f{};
    for (int a = 0; a < c.dims(); ++a) {
        for (int b = 0; b < c.dims(); ++b) {
            f[static_cast<std::size_t>(a)] += c.stress(a, b, p, bump({0, 0, 0}, b));
        }
    }
    return f;
}

Tensor3 apply_compliance(const Tensor3& sigma, const LameParameters& params, int dims)
{
    double tr = 0.0;
    for (int a = 0; a < dims; ++a) {
        tr += sigma[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)];
    }
    const double ratio = params.compliance_ratio(dims);
    Tensor3 e{};
    for (int a = 0; a < dims; ++a) {
        for (int b = 0; b < dims; ++b) {
            const auto au = static_cast<std::size_t>(a);
            const auto bu = static_cast<std::size_t>(b);
            e[au][bu] = (sigma[au][bu] - (a == b ? ratio * tr : 0.0)) / (2.0 * params.mu);
        }
    }
    return e;
}

namespace {

void check_dims(const ManufacturedCase& c, const GridPtr& grid)
{
    if (!grid || grid->dims() != c.dims()) {
        throw std::invalid_argument("case '" + c.name() + "' needs a " + std::to_string(c.dims()) + "D grid");
    }
}

void zero_normal_boundary(StaggeredField& f, int axis)
{
    const std::size_t n = f.grid()->cells(axis);
    for (std::size_t flat = 0; flat < f.size(); ++flat) {
        const auto idx = f.multi_index(flat)[static_cast<std::size_t>(axis)];
        if (idx == 0 || idx == n) {
            f[flat] = 0.0;
        }
    }
}

// Fills a field by evaluating fn(point, multi-index) at every location.
template <class Fn>
StaggeredField fill(const GridPtr& grid, GridLocation loc, Fn&& fn)
{
    StaggeredField f(grid, loc);
    for (std::size_t flat = 0; flat < f.size(); ++flat) {
        f[flat] = fn(f.point(flat), f.multi_index(flat));
    }
    return f;
}

}  // namespace

StressFields exact_stress_fields(const ManufacturedCase& c, const GridPtr& grid)
{
    check_dims(c, grid);
    const int d = c.dims();
    StressFields s;
    for (int a = 0; a < d; ++a) {
        s.normal.push_back(fill(grid, GridLocation::kCell, [&](const Point& p, auto) { return c.stress(a, a, p); }));
    }
    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b) {
            s.shear.push_back(
                fill(grid, shear_location(a, b, d), [&](const Point& p, auto) { return c.stress(a, b, p); }));
        }
    }
    return s;
}

DisplacementFields exact_displacement_fields(const ManufacturedCase& c, const GridPtr& grid)
{
    check_dims(c, grid);
    DisplacementFields w;
    for (int a = 0; a < c.dims(); ++a) {
        w.comp.push_back(fill(grid, face_location(a), [&](const Point& p, auto) { return c.displacement(a, p); }));
        zero_normal_boundary(w.comp.back(), a);
    }
    return w;
}

DisplacementFields body_force_fields(const ManufacturedCase& c, const GridPtr& grid)
{
    check_dims(c, grid);
    DisplacementFields f;
    for (int a = 0; a < c.dims(); ++a) {
        f.comp.push_back(fill(grid, face_location(a),
                              [&](const Point& p, auto) { return body_force(c, p)[static_cast<std::size_t>(a)]; }));
    }
    return f;
}

Interpolant interpolant_fields(const ManufacturedCase& c, const GridPtr& grid)
{
    check_dims(c, grid);
    const int d = c.dims();
    auto second = [](int axis) {
        Multi m{0, 0, 0};
        m[static_cast<std::size_t>(axis)] = 2;
        return m;
    };
    auto width_sq = [&](int axis, std::size_t idx) {
        const double h = grid->axis(axis).cell_width(idx);
        return h * h / 8.0;
    };

    Interpolant out;
    for (int a = 0; a < d; ++a) {
        out.stress.normal.push_back(fill(grid, GridLocation::kCell, [&](const Point& p, const auto& idx) {
            double v = c.stress(a, a, p);
            for (int b = 0; b < d; ++b) {
                v -= width_sq(b, idx[static_cast<std::size_t>(b)]) * c.stress(a, a, p, second(b));
            }
            return v;
        }));
    }
    out.stress.shear = exact_stress_fields(c, grid).shear;
    for (int a = 0; a < d; ++a) {
        out.displacement.comp.push_back(fill(grid, face_location(a), [&](const Point& p, const auto& idx) {
            double v = c.displacement(a, p);
            for (int b = 0; b < d; ++b) {
                if (b != a) {
                    v -= width_sq(b, idx[static_cast<std::size_t>(b)]) * c.displacement(a, p, second(b));
                }
            }
            return v;
        }));
        zero_normal_boundary(out.displacement.comp.back(), a);
    }
    return out;
}

std::vector<std::string> component_names(int dims)
{
    if (dims == 2) {
        return {"Wx", "Wy", "Z11", "Z22", "Z12"};
    }
    return {"Wx", "Wy", "Wz", "Z11", "Z22", "Z33", "Z12", "Z13", "Z23"};
}

namespace {

double lookup(const std::vector<ComponentError>& v, const std::string& component)
{
    for (const auto& e : v) {
        if (e.component == component) {
            return e.error;
        }
    }
    throw std::out_of_range("no error recorded for component '" + component + "'");
}

std::vector<ComponentError> differences(const StressFields& z, const DisplacementFields& w, const StressFields& zs,
                                        const DisplacementFields& ws)
{
    const int d = z.dims();
    constexpr const char* kAxis[] = {"x", "y", "z"};
    std::vector<ComponentError> out;
    for (int a = 0; a < d; ++a) {
        const auto& f = w.comp[static_cast<std::size_t>(a)];
        out.push_back({std::string("W") + kAxis[a], norm_label(f.location(), d),
                       norm(f - ws.comp[static_cast<std::size_t>(a)])});
    }
    for (int a = 0; a < d; ++a) {
        const auto& f = z.normal[static_cast<std::size_t>(a)];
        out.push_back({"Z" + std::to_string(a + 1) + std::to_string(a + 1), norm_label(f.location(), d),
                       norm(f - zs.normal[static_cast<std::size_t>(a)])});
    }
    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b) {
            const auto& f = z.shear_component(a, b);
            out.push_back({"Z" + std::to_string(a + 1) + std::to_string(b + 1), norm_label(f.location(), d),
                           norm(f - zs.shear_component(a, b))});
        }
    }
    return out;
}

}  // namespace

double ErrorReport::exact(const std::string& component) const
{
    return lookup(vs_exact, component);
}

double ErrorReport::interpolant(const std::string& component) const
{
    return lookup(vs_interpolant, component);
}

ErrorReport error_report(const StressFields& z, const DisplacementFields& w, const ManufacturedCase& c,
                         const GridPtr& grid)
{
    check_dims(c, grid);
    auto on_grid = [&](const StaggeredField& f) { return f.grid() == grid || *f.grid() == *grid; };
    if (z.dims() != c.dims() || w.dims() != c.dims() ||
        !std::all_of(z.normal.begin(), z.normal.end(), on_grid) ||
        !std::all_of(z.shear.begin(), z.shear.end(), on_grid) ||
        !std::all_of(w.comp.begin(), w.comp.end(), on_grid)) {
        throw std::invalid_argument("error_report: fields do not live on the given grid");
    }
    // Rebuild candidates on `grid` itself so the differences are well defined.
    StressFields zz = StressFields::zeros(grid);
    DisplacementFields ww = DisplacementFields::zeros(grid);
    auto copy = [](const StaggeredField& src, StaggeredField& dst) {
        if (src.location() != dst.location() || src.size() != dst.size()) {
            throw std::invalid_argument("error_report: field location mismatch");
        }
        std::copy(src.values().begin(), src.values().end(), dst.values().begin());
    };
    for (std::size_t i = 0; i < zz.normal.size(); ++i) copy(z.normal[i], zz.normal[i]);
    for (std::size_t i = 0; i < zz.shear.size(); ++i) copy(z.shear[i], zz.shear[i]);
    for (std::size_t i = 0; i < ww.comp.size(); ++i) copy(w.comp[i], ww.comp[i]);

    ErrorReport r;
    r.vs_exact = differences(zz, ww, exact_stress_fields(c, grid), exact_displacement_fields(c, grid));
    const Interpolant it = interpolant_fields(c, grid);
    r.vs_interpolant = differences(zz, ww, it.stress, it.displacement);
    return r;
}

ErrorReport error_report(const Solution& sol, const MacSystem& sys, const ManufacturedCase& c)
{
    StressFields z = StressFields::zeros(sys.grid());
    DisplacementFields w = DisplacementFields::zeros(sys.grid());
    sol.decode(sys.map, z, w);
    return error_report(z, w, c, sys.grid());
}

MacSystem assemble_case(const ManufacturedCase& c, const GridPtr& grid)
{
    return assemble(grid, c.params(), body_force_fields(c, grid));
}

std::string MeshMode::describe() const
{
    if (kind == Kind::kUniform) {
        return "uniform";
    }
    std::ostringstream os;
    os << "perturbed(seed=" << seed << ", amplitude=" << amplitude << ")";
    return os.str();
}

GridPtr base_grid(int dims, std::size_t cells, const MeshMode& mode)
{
    if (dims != 2 && dims != 3) {
        throw std::invalid_argument("base_grid: dims must be 2 or 3");
    }
    if (cells < 1) {
        throw std::invalid_argument("base_grid: need at least one cell per axis");
    }
    std::vector<AxisPartition> axes;
    for (int a = 0; a < dims; ++a) {
        if (mode.kind == MeshMode::Kind::kUniform) {
            axes.push_back(uniform_axis(cells, 0.0, 1.0));
        } else {
            axes.push_back(perturbed_axis(cells, 0.0, 1.0, mode.amplitude, mode.seed + static_cast<std::uint64_t>(a)));
        }
    }
    return make_grid(std::move(axes));
}

bool ConvergenceReport::ok() const
{
    return std::all_of(levels.begin(), levels.end(), [](const LevelResult& l) { return l.ok; });
}

std::optional<double> ConvergenceReport::error(const std::string& component, std::size_t level, Target t) const
{
    if (level >= levels.size() || !levels[level].ok) {
        return std::nullopt;
    }
    const auto& e = levels[level].errors;
    return t == Target::kExact ? e.exact(component) : e.interpolant(component);
}

std::optional<double> ConvergenceReport::rate(const std::string& component, std::size_t level, Target t) const
{
    if (level == 0) {
        return std::nullopt;
    }
    const auto coarse = error(component, level - 1, t);
    const auto fine = error(component, level, t);
    if (!coarse || !fine || !(*fine > 0.0) || !(*coarse > 0.0)) {
        return std::nullopt;
    }
    return std::log2(*coarse / *fine);
}

ConvergenceReport convergence_study(const ManufacturedCase& c, std::size_t base_cells, int levels,
                                    const MeshMode& mode, const SolverOptions& options, int threads)
{
    if (levels < 1) {
        throw std::invalid_argument("convergence_study: need at least one level");
    }
    ConvergenceReport report;
    report.case_name = c.name();
    report.dims = c.dims();
    report.params = c.params();
    report.mode = mode;

    std::vector<GridPtr> grids{base_grid(c.dims(), base_cells, mode)};
    for (int l = 1; l < levels; ++l) {
        grids.push_back(refine(*grids.back()));
    }
    report.levels.resize(grids.size());

    auto run_level = [&](std::size_t l) {
        LevelResult& res = report.levels[l];
        res.level = static_cast<int>(l);
        for (int a = 0; a < c.dims(); ++a) {
            res.cells[static_cast<std::size_t>(a)] = grids[l]->cells(a);
        }
        const auto start = std::chrono::steady_clock::now();
        try {
            const MacSystem sys = assemble_case(c, grids[l]);
            res.unknowns = sys.size();
            const Solution sol = solve(sys, options);
            res.residual = sol.residual;
            res.iterations = sol.iterations;
            res.backend = sol.backend;
            res.errors = error_report(sol, sys, c);
            res.ok = true;
        } catch (const NonConvergenceError& e) {
            res.failure = e.what();
            res.residual = e.residual();
            res.iterations = e.iterations();
        } catch (const std::exception& e) {
            res.failure = e.what();
        }
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, grids.size());
    if (workers == 1) {
        for (std::size_t l = 0; l < grids.size(); ++l) {
            run_level(l);
        }
    } else {
        // Largest levels first so the longest solve starts immediately.
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < grids.size(); k = next++) {
                    run_level(grids.size() - 1 - k);
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    return report;
}

namespace {

std::string fmt(const char* spec, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string norm_of(const ConvergenceReport& r, const std::string& component)
{
    for (const auto& l : r.levels) {
        if (l.ok) {
            for (const auto& e : l.errors.vs_exact) {
                if (e.component == component) return e.norm;
            }
        }
    }
    // No level succeeded; derive the label from the location family.
    if (component[0] == 'W') {
        return norm_label(face_location(component[1] - 'x'), r.dims);
    }
    const int a = component[1] - '1';
    const int b = component[2] - '1';
    return norm_label(a == b ? GridLocation::kCell : shear_location(a, b, r.dims), r.dims);
}

std::string mesh_label(const LevelResult& l, int dims)
{
    std::string s = std::to_string(l.cells[0]);
    for (int a = 1; a < dims; ++a) {
        s += "x" + std::to_string(l.cells[static_cast<std::size_t>(a)]);
    }
    return s;
}

std::string symbol(const std::string& component, ConvergenceReport::Target t)
{
    const bool interp = t == ConvergenceReport::Target::kInterpolant;
    if (component[0] == 'W') {
        const std::string ax(1, component[1]);
        return "W^" + ax + " - " + (interp ? "~u^" : "u^") + ax;
    }
    const std::string ij = component.substr(1);
    const bool normal = ij[0] == ij[1];
    return "Z^" + ij + " - " + (interp && normal ? "~sigma^" : "sigma^") + ij;
}

}  // namespace

void write_csv(std::ostream& os, const ConvergenceReport& r, ConvergenceReport::Target t)
{
    os << "level,nx,ny" << (r.dims == 3 ? ",nz" : "") << ",component,norm,error,rate,residual\n";
    for (std::size_t l = 0; l < r.levels.size(); ++l) {
        const auto& lv = r.levels[l];
        for (const auto& comp : component_names(r.dims)) {
            os << l;
            for (int a = 0; a < r.dims; ++a) {
                os << ',' << lv.cells[static_cast<std::size_t>(a)];
            }
            os << ',' << comp << ',' << norm_of(r, comp) << ',';
            const auto e = r.error(comp, l, t);
            os << (e ? fmt("%.6e", *e) : std::string("nan")) << ',';
            const auto rt = r.rate(comp, l, t);
            if (rt) os << fmt("%.4f", *rt);
            os << ',';
            if (lv.ok) os << fmt("%.3e", lv.residual);
            os << '\n';
        }
    }
}

void write_markdown(std::ostream& os, const ConvergenceReport& r, ConvergenceReport::Target t)
{
    std::vector<std::vector<std::string>> groups;
    if (r.dims == 2) {
        groups = {{"Wx", "Wy"}, {"Z11", "Z12", "Z22"}};
    } else {
        groups = {{"Wx", "Wy", "Wz"}, {"Z11", "Z22", "Z33"}, {"Z12", "Z13", "Z23"}};
    }
    os << "### " << r.case_name << ", " << r.mode.describe() << ", lambda=" << r.params.lambda
       << ", mu=" << r.params.mu << (t == ConvergenceReport::Target::kInterpolant ? ", vs interpolant" : "")
       << "\n\n";
    for (const auto& g : groups) {
        os << "| mesh |";
        for (const auto& comp : g) {
            os << " ||" << symbol(comp, t) << "||_" << norm_of(r, comp) << " | Rate |";
        }
        os << "\n|---|";
        for (std::size_t i = 0; i < g.size(); ++i) {
            os << "---|---|";
        }
        os << '\n';
        for (std::size_t l = 0; l < r.levels.size(); ++l) {
            os << "| " << mesh_label(r.levels[l], r.dims) << " |";
            for (const auto& comp : g) {
                const auto e = r.error(comp, l, t);
                const auto rt = r.rate(comp, l, t);
                os << ' ' << (e ? fmt("%.3E", *e) : std::string("failed")) << " | "
                   << (rt ? fmt("%.3f", *rt) : std::string("---")) << " |";
            }
            os << '\n';
        }
        os << '\n';
    }
    for (const auto& lv : r.levels) {
        if (!lv.ok) {
            os << "Level " << lv.level << " (" << mesh_label(lv, r.dims) << ") failed: " << lv.failure << "\n";
        }
    }
}

}  // namespace macelast
