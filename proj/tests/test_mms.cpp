#include "doctest.h"

#include "macelast/mms.hpp"
#include "macelast/tables.hpp"
#include "support/random.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace macelast;
using testing_support::Rng;
using testing_support::uniform;

namespace {

constexpr double kPi = std::numbers::pi;

// u = (x, 0) in 2D
ManufacturedCase stretch(double lambda, double mu)
{
    SeparableTerm t;
    t.factor[0] = Function1D::polynomial({0.0, 1.0});
    return ManufacturedCase("stretch", 2, {lambda, mu}, {{t}, {}});
}

// u = (2x - y, x + 3y, z - x) plus a constant
ManufacturedCase linear3d()
{
    auto lin = [](int axis, double c) {
        SeparableTerm t;
        t.factor[static_cast<std::size_t>(axis)] = Function1D::polynomial({0.0, c});
        return t;
    };
    SeparableTerm k;
    k.factor[0] = Function1D::constant(0.5);
    return ManufacturedCase("linear", 3, {3.0, 2.0}, {{lin(0, 2), lin(1, -1), k}, {lin(0, 1), lin(1, 3)}, {lin(2, 1), lin(0, -1)}});
}

Point random_interior(Rng& rng)
{
    return {uniform(rng, 0.05, 0.95), uniform(rng, 0.05, 0.95), uniform(rng, 0.05, 0.95)};
}

Point shifted(Point p, int axis, double h)
{
    p[static_cast<std::size_t>(axis)] += h;
    return p;
}

}  // namespace

TEST_CASE("one-dimensional term algebra")
{
    Rng rng(1);
    const auto f = Function1D::trig(2 * kPi, 1, 2, 0.7) * Function1D::polynomial({1.0, -2.0, 0.5}) +
                   Function1D::exponential(1.3, -0.4) * Function1D::trig(2 * kPi, 0, 1);
    for (int i = 0; i < 20; ++i) {
        const double x = uniform(rng, -1, 1);
        const double h = 1e-4;
        const double fd1 = (f(x + h / 10) - f(x - h / 10)) / (h / 5);
        const double fd2 = (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
        CHECK(f.derivative()(x) == doctest::Approx(fd1).epsilon(1e-6));
        CHECK(f.derivative(2)(x) == doctest::Approx(fd2).epsilon(1e-5));
        CHECK(f.derivative(3)(x) == doctest::Approx(f.derivative().derivative(2)(x)).epsilon(1e-12));
        CHECK((f - f)(x) == 0.0);
        CHECK((2.0 * f)(x) == doctest::Approx(2 * f(x)));
    }
    CHECK(f.derivative(0)(0.3) == f(0.3));
    CHECK(Function1D::polynomial({1.0, 2.0, 3.0})(2.0) == doctest::Approx(17.0));
    CHECK_THROWS_AS(Function1D::trig(1.0, 1, 0) * Function1D::trig(2.0, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(f.derivative(-1), std::invalid_argument);
}

TEST_CASE("manufactured displacements")
{
    CHECK_THROWS_AS(ManufacturedCase::by_name("example4", 10.0), std::invalid_argument);
    CHECK(ManufacturedCase::by_name("example2", 10.0).dims() == 2);
    CHECK(ManufacturedCase::by_name("example3", 10.0).dims() == 3);

    const auto e1 = ManufacturedCase::example1(10.0);
    const Point p{0.3, 0.7, 0.0};
    const double s = std::sin(kPi * 0.3) * std::sin(kPi * 0.7) / 11.0;
    CHECK(e1.displacement(0, p) ==
          doctest::Approx(std::sin(2 * kPi * 0.7) * (std::cos(2 * kPi * 0.3) - 1) + s).epsilon(1e-14));
    CHECK(e1.displacement(1, p) ==
          doctest::Approx(std::sin(2 * kPi * 0.3) * (1 - std::cos(2 * kPi * 0.7)) + s).epsilon(1e-14));

    Rng rng(2);
    for (const auto& c : {ManufacturedCase::example1(10.0), ManufacturedCase::example2(10.0),
                          ManufacturedCase::example3(10.0), ManufacturedCase::example3(1e7)}) {
        // vanishes on the boundary
        for (int trial = 0; trial < 20; ++trial) {
            auto q = random_interior(rng);
            const int axis = trial % c.dims();
            q[static_cast<std::size_t>(axis)] = trial % 2 ? 1.0 : 0.0;
            for (int a = 0; a < c.dims(); ++a) CHECK(std::abs(c.displacement(a, q)) < 1e-12);
        }
        // closed-form partials against central differences
        const double h = 1e-4;
        for (int trial = 0; trial < 20; ++trial) {
            const auto q = random_interior(rng);
            for (int a = 0; a < c.dims(); ++a) {
                for (int b = 0; b < c.dims(); ++b) {
                    Multi d1{0, 0, 0};
                    d1[static_cast<std::size_t>(b)] = 1;
                    Multi d2 = d1;
                    d2[static_cast<std::size_t>(b)] = 2;
                    const double up = c.displacement(a, shifted(q, b, h));
                    const double dn = c.displacement(a, shifted(q, b, -h));
                    const double mid = c.displacement(a, q);
                    const double scale = 1 + std::abs(c.displacement(a, q, d2));
                    CHECK(std::abs(c.displacement(a, q, d1) - (up - dn) / (2 * h)) <= 1e-5 * scale);
                    CHECK(std::abs(c.displacement(a, q, d2) - (up - 2 * mid + dn) / (h * h)) <= 1e-3 * scale);
                }
            }
        }
    }
    CHECK_THROWS_AS(e1.displacement(2, p), std::invalid_argument);
    CHECK_THROWS_AS(e1.displacement(0, p, {5, 0, 0}), std::invalid_argument);
}

TEST_CASE("exact stress")
{
    const auto zero = ManufacturedCase("zero", 2, {1.0, 1.0}, {{}, {}});
    const auto s0 = exact_stress(zero, {0.4, 0.4, 0.0});
    for (const auto& row : s0)
        for (double v : row) CHECK(v == 0.0);

    const auto c = stretch(3.0, 0.5);
    const auto s = exact_stress(c, {0.2, 0.9, 0.0});
    CHECK(s[0][0] == doctest::Approx(2 * 0.5 + 3.0));
    CHECK(s[1][1] == doctest::Approx(3.0));
    CHECK(s[0][1] == 0.0);
    CHECK(s[1][0] == 0.0);
    const auto f = body_force(c, {0.2, 0.9, 0.0});
    CHECK(f[0] == 0.0);
    CHECK(f[1] == 0.0);
}

TEST_CASE("compliance round trip")
{
    Rng rng(3);
    for (const auto& c : {ManufacturedCase::example1(10.0), ManufacturedCase::example1(1e7),
                          ManufacturedCase::example2(10.0), ManufacturedCase::example3(10.0),
                          ManufacturedCase::example3(1e7, 0.5)}) {
        for (int trial = 0; trial < 20; ++trial) {
            const auto p = random_interior(rng);
            const auto sigma = exact_stress(c, p);
            const auto eps = apply_compliance(sigma, c.params(), c.dims());
            double smax = 0.0;
            for (const auto& row : sigma)
                for (double v : row) smax = std::max(smax, std::abs(v));
            for (int a = 0; a < c.dims(); ++a)
                for (int b = 0; b < c.dims(); ++b) {
                    CHECK(sigma[a][b] == sigma[b][a]);
                    CHECK(std::abs(eps[a][b] - c.strain(a, b, p)) <= 1e-12 * std::max(1.0, smax / c.params().mu));
                }
        }
    }
}

TEST_CASE("body force against differences of the exact stress")
{
    auto fd_divergence = [](const ManufacturedCase& c, const Point& p, double h, bool fourth) {
        std::array<double, 3> f{0, 0, 0};
        for (int a = 0; a < c.dims(); ++a)
            for (int b = 0; b < c.dims(); ++b) {
                auto s = [&](double t) { return exact_stress(c, shifted(p, b, t))[a][b]; };
                f[a] += fourth ? (-s(2 * h) + 8 * s(h) - 8 * s(-h) + s(-2 * h)) / (12 * h) : (s(h) - s(-h)) / (2 * h);
            }
        return f;
    };
    const auto e1 = ManufacturedCase::example1(10.0);
    const Point p1{0.3, 0.7, 0.0};
    const auto e3 = ManufacturedCase::example3(10.0);
    const Point p3{0.25, 0.5, 0.75};
    for (const auto& [c, p] : {std::pair{e1, p1}, std::pair{e3, p3}}) {
        const auto f = body_force(c, p);
        const auto fd = fd_divergence(c, p, 1e-3, true);
        for (int a = 0; a < c.dims(); ++a) CHECK(std::abs(f[a] - fd[a]) <= 1e-6 * std::max(1.0, std::abs(f[a])));

        // observed order of the second-order difference over a step sweep
        double prev = 0.0;
        for (double h : {4e-2, 2e-2, 1e-2}) {
            const auto g = fd_divergence(c, p, h, false);
            double err = 0.0;
            for (int a = 0; a < c.dims(); ++a) err = std::max(err, std::abs(g[a] - f[a]));
            if (prev > 0.0) CHECK(std::log2(prev / err) >= 1.9);
            prev = err;
        }
    }
}

TEST_CASE("sampled fields")
{
    const auto c = ManufacturedCase::example1(10.0);
    const auto g = uniform_grid(2, 4);
    const auto w = exact_displacement_fields(c, g);
    CHECK(w.comp[0](0, 2) == 0.0);
    CHECK(w.comp[0](2, 2) == doctest::Approx(c.displacement(0, {0.5, 0.625, 0.0})));
    CHECK(w.comp[1](1, 4) == 0.0);
    const auto s = exact_stress_fields(c, g);
    CHECK(s.normal[1](1, 3) == doctest::Approx(c.stress(1, 1, {0.375, 0.875, 0.0})));
    CHECK(s.shear[0](4, 1) == doctest::Approx(c.stress(0, 1, {1.0, 0.25, 0.0})));
    const auto f = body_force_fields(c, g);
    CHECK(f.comp[1](3, 1) == doctest::Approx(body_force(c, {0.875, 0.25, 0.0})[1]));
    CHECK_THROWS_AS(exact_stress_fields(c, uniform_grid(3, 2)), std::invalid_argument);
}

TEST_CASE("interpolants")
{
    SUBCASE("linear fields are reproduced")
    {
        const auto c = linear3d();
        Rng rng(4);
        const auto g = testing_support::random_grid(rng, 3, 2, 5);
        const auto it = interpolant_fields(c, g);
        const auto ex_s = exact_stress_fields(c, g);
        const auto ex_w = exact_displacement_fields(c, g);
        for (int a = 0; a < 3; ++a) {
            CHECK(max_abs(it.displacement.comp[a] - ex_w.comp[a]) < 1e-14);
            CHECK(max_abs(it.stress.normal[a] - ex_s.normal[a]) < 1e-13);
            CHECK(max_abs(it.stress.shear[a] - ex_s.shear[a]) == 0.0);
        }
    }
    SUBCASE("correction term on a uniform mesh")
    {
        const auto c = ManufacturedCase::example1(10.0);
        const auto g = uniform_grid(2, 8);
        const auto it = interpolant_fields(c, g);
        const auto ex = exact_displacement_fields(c, g);
        auto uyy = sample(g, GridLocation::kFaceX, [&](const Point& p) { return c.displacement(0, p, {0, 2, 0}); });
        const double l = 1.0 / 8;
        CHECK(norm(it.displacement.comp[0] - ex.comp[0]) == doctest::Approx(l * l / 8 * norm(uyy)).epsilon(1e-12));

        const auto sx = exact_stress_fields(c, g);
        auto lap = sample(g, GridLocation::kCell, [&](const Point& p) {
            return c.stress(0, 0, p, {2, 0, 0}) + c.stress(0, 0, p, {0, 2, 0});
        });
        CHECK(norm(sx.normal[0] - it.stress.normal[0]) == doctest::Approx(l * l / 8 * norm(lap)).epsilon(1e-12));
        CHECK(max_abs(it.stress.shear[0] - sx.shear[0]) == 0.0);
    }
}

TEST_CASE("error reports")
{
    const auto c = ManufacturedCase::example1(10.0);
    const auto g = uniform_grid(2, 8);
    const auto r0 = error_report(exact_stress_fields(c, g), exact_displacement_fields(c, g), c, g);
    CHECK(r0.vs_exact.size() == 5);
    for (const auto& e : r0.vs_exact) CHECK(e.error == 0.0);
    CHECK(r0.vs_exact[0].norm == "TM");
    CHECK(r0.vs_exact[4].component == "Z12");
    CHECK(r0.vs_exact[4].norm == "T");
    CHECK_THROWS_AS(r0.exact("Z33"), std::out_of_range);
    CHECK(component_names(3).size() == 9);

    // frozen regression value, also produced by an independent pointwise solver
    const auto sys = assemble_case(c, g);
    const auto r = error_report(solve_direct(sys), sys, c);
    CHECK(r.exact("Wx") == doctest::Approx(4.592848e-02).epsilon(1e-6));
    CHECK(r.exact("Wy") == doctest::Approx(4.592848e-02).epsilon(1e-6));

    CHECK_THROWS_AS(error_report(StressFields::zeros(uniform_grid(2, 4)), DisplacementFields::zeros(g), c, g),
                    std::invalid_argument);
}

TEST_CASE("convergence report rates")
{
    ConvergenceReport rep;
    rep.dims = 2;
    for (int level = 0; level < 3; ++level) {
        LevelResult lv;
        lv.level = level;
        lv.ok = true;
        const double e = level == 2 ? 0.25 : 1.0;  // level 1 repeats level 0
        lv.errors.vs_exact = {{"Wx", "TM", e}};
        lv.errors.vs_interpolant = {{"Wx", "TM", e / 2}};
        rep.levels.push_back(lv);
    }
    CHECK_FALSE(rep.rate("Wx", 0));
    CHECK(*rep.rate("Wx", 1) == 0.0);
    CHECK(*rep.rate("Wx", 2) == doctest::Approx(2.0));
    CHECK(*rep.error("Wx", 2, ConvergenceReport::Target::kInterpolant) == 0.125);
    rep.levels[1].ok = false;
    CHECK_FALSE(rep.rate("Wx", 1));
    CHECK_FALSE(rep.rate("Wx", 2));
    CHECK_FALSE(rep.ok());
}

TEST_CASE("convergence study")
{
    const auto c = ManufacturedCase::example1(10.0);
    const auto rep = convergence_study(c, 8, 3, MeshMode::uniform());
    REQUIRE(rep.levels.size() == 3);
    CHECK(rep.ok());
    CHECK(rep.levels[2].cells[0] == 32);
    CHECK(*rep.error("Wx", 0) == doctest::Approx(4.592848e-02).epsilon(1e-6));
    for (const auto& comp : component_names(2)) {
        CHECK(*rep.rate(comp, 2) > 1.9);
        CHECK(*rep.rate(comp, 2) < 2.1);
    }

    const auto threaded = convergence_study(c, 8, 3, MeshMode::uniform(), {}, 3);
    for (std::size_t l = 0; l < 3; ++l)
        for (const auto& comp : component_names(2)) CHECK(*threaded.error(comp, l) == *rep.error(comp, l));

    CHECK_THROWS_AS(convergence_study(c, 8, 0, MeshMode::uniform()), std::invalid_argument);
}

TEST_CASE("perturbed base grids")
{
    const auto a = base_grid(2, 8, MeshMode::perturbed(42));
    const auto b = base_grid(2, 8, MeshMode::perturbed(42));
    CHECK(*a == *b);
    CHECK(a->axis(0) == perturbed_axis(8, 0.0, 1.0, 0.3, 42));
    CHECK(a->axis(1) == perturbed_axis(8, 0.0, 1.0, 0.3, 43));
    CHECK(*base_grid(3, 4, MeshMode::uniform()) == *uniform_grid(3, 4));
    CHECK(MeshMode::perturbed(42).describe() == "perturbed(seed=42, amplitude=0.3)");
}

TEST_CASE("failed levels are recorded")
{
    const auto c = ManufacturedCase::example1(1e7);
    SolverOptions o;
    o.backend = SolverBackend::kIterative;
    o.max_iterations = 3;
    const auto rep = convergence_study(c, 4, 2, MeshMode::uniform(), o);
    REQUIRE(rep.levels.size() == 2);
    for (const auto& lv : rep.levels) {
        CHECK_FALSE(lv.ok);
        CHECK_FALSE(lv.failure.empty());
    }
    CHECK_FALSE(rep.ok());
    std::ostringstream os;
    write_csv(os, rep);
    CHECK(os.str().find("nan") != std::string::npos);
    std::ostringstream md;
    write_markdown(md, rep);
    CHECK(md.str().find("failed") != std::string::npos);
}

TEST_CASE("table output")
{
    const auto c = ManufacturedCase::example3(10.0);
    const auto rep = convergence_study(c, 2, 2, MeshMode::uniform());
    std::ostringstream os;
    write_csv(os, rep);
    const auto t = ResultTable::parse(os.str());
    CHECK(t.header() == std::vector<std::string>{"level", "nx", "ny", "nz", "component", "norm", "error", "rate", "residual"});
    REQUIRE(t.rows().size() == 18);
    CHECK(t.rows()[0][4] == "Wx");
    CHECK(t.rows()[0][5] == "TMM");
    CHECK(t.rows()[0][7].empty());
    CHECK_FALSE(t.rows()[9][7].empty());
    CHECK(t.rows()[9][1] == "4");

    std::ostringstream md;
    write_markdown(md, rep);
    CHECK(md.str().find("| 4x4x4 |") != std::string::npos);
    CHECK(md.str().find("---") != std::string::npos);

    std::ostringstream a, b;
    write_csv(a, rep, ConvergenceReport::Target::kInterpolant);
    write_csv(b, rep, ConvergenceReport::Target::kInterpolant);
    CHECK(a.str() == b.str());
    CHECK(a.str() != os.str());
}
