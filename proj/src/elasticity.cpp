#include "macelast/elasticity.hpp"

#include "macelast/ops.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace macelast {

void LameParameters::validate() const
{
    if (!(lambda > 0.0) || !(mu > 0.0) || !std::isfinite(lambda) || !std::isfinite(mu)) {
        throw std::invalid_argument("LameParameters: lambda and mu must be positive and finite");
    }
}

namespace {

constexpr const char* kAxisName[] = {"x", "y", "z"};

std::size_t local_index(const UnknownBlock& blk, std::size_t i, std::size_t j, std::size_t k)
{
    return blk.offset + i + blk.extents[0] * (j + blk.extents[1] * k);
}

}  // namespace

UnknownMap::UnknownMap(const GridPtr& grid) : grid_(grid)
{
    if (!grid_) {
        throw std::invalid_argument("UnknownMap: null grid");
    }
    const int d = grid_->dims();
    std::size_t offset = 0;

    auto add = [&](std::string name, UnknownBlock::Kind kind, int a, int b, GridLocation loc) {
        UnknownBlock blk{std::move(name), kind, a, b, loc, offset, 0, {1, 1, 1}};
        std::size_t count = 1;
        for (int ax = 0; ax < d; ++ax) {
            std::size_t n = grid_->cells(ax);
            std::size_t e = is_node_type(loc, ax) ? n + 1 : n;
            if (kind == UnknownBlock::Kind::kDisplacement && ax == a) {
                e = n - 1;
            }
            blk.extents[static_cast<std::size_t>(ax)] = e;
            count *= e;
        }
        blk.count = count;
        offset += count;
        blocks_.push_back(std::move(blk));
        return blocks_.size() - 1;
    };

    for (int a = 0; a < d; ++a) {
        normal_block_[static_cast<std::size_t>(a)] =
            add("Z" + std::to_string(a + 1) + std::to_string(a + 1), UnknownBlock::Kind::kNormalStress, a, a,
                GridLocation::kCell);
    }
    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b) {
            shear_block_[shear_slot(a, b)] = add("Z" + std::to_string(a + 1) + std::to_string(b + 1),
                                                 UnknownBlock::Kind::kShearStress, a, b, shear_location(a, b, d));
        }
    }
    stress_size_ = offset;
    for (int a = 0; a < d; ++a) {
        disp_block_[static_cast<std::size_t>(a)] =
            add(std::string("W") + kAxisName[a], UnknownBlock::Kind::kDisplacement, a, a, face_location(a));
    }
    size_ = offset;
}

std::size_t UnknownMap::normal_stress(int a, std::size_t i, std::size_t j, std::size_t k) const
{
    return local_index(blocks_[normal_block_[static_cast<std::size_t>(a)]], i, j, k);
}

std::size_t UnknownMap::shear_stress(int a, int b, std::size_t i, std::size_t j, std::size_t k) const
{
    return local_index(blocks_[shear_block_[shear_slot(a, b)]], i, j, k);
}

std::ptrdiff_t UnknownMap::displacement(int a, std::size_t i, std::size_t j, std::size_t k) const
{
    std::array<std::size_t, 3> mi{i, j, k};
    auto& along = mi[static_cast<std::size_t>(a)];
    if (along == 0 || along >= grid_->cells(a)) {
        return -1;
    }
    along -= 1;
    return static_cast<std::ptrdiff_t>(
        local_index(blocks_[disp_block_[static_cast<std::size_t>(a)]], mi[0], mi[1], mi[2]));
}

const UnknownBlock& UnknownMap::block_of(std::size_t unknown) const
{
    for (const auto& blk : blocks_) {
        if (unknown >= blk.offset && unknown < blk.offset + blk.count) {
            return blk;
        }
    }
    throw std::out_of_range("UnknownMap::block_of: index " + std::to_string(unknown) + " out of range");
}

std::string UnknownMap::describe(std::size_t unknown) const
{
    const auto& blk = block_of(unknown);
    std::size_t r = unknown - blk.offset;
    std::array<std::size_t, 3> mi{};
    mi[0] = r % blk.extents[0];
    r /= blk.extents[0];
    mi[1] = r % blk.extents[1];
    mi[2] = r / blk.extents[1];
    if (blk.kind == UnknownBlock::Kind::kDisplacement) {
        mi[static_cast<std::size_t>(blk.a)] += 1;
    }
    std::string s = blk.name + "(";
    for (int ax = 0; ax < dims(); ++ax) {
        if (ax > 0) {
            s += ',';
        }
        s += std::to_string(mi[static_cast<std::size_t>(ax)]);
    }
    return s + ")";
}

Eigen::VectorXd UnknownMap::encode(const StressFields& s, const DisplacementFields& w) const
{
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size_));
    const int d = dims();
    for (int a = 0; a < d; ++a) {
        const auto& f = s.normal[static_cast<std::size_t>(a)];
        for (std::size_t n = 0; n < f.size(); ++n) {
            const auto mi = f.multi_index(n);
            x[static_cast<Eigen::Index>(normal_stress(a, mi[0], mi[1], mi[2]))] = f[n];
        }
        const auto& u = w.comp[static_cast<std::size_t>(a)];
        for (std::size_t n = 0; n < u.size(); ++n) {
            const auto mi = u.multi_index(n);
            const auto idx = displacement(a, mi[0], mi[1], mi[2]);
            if (idx >= 0) {
                x[idx] = u[n];
            }
        }
    }
    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b) {
            const auto& f = s.shear_component(a, b);
            for (std::size_t n = 0; n < f.size(); ++n) {
                const auto mi = f.multi_index(n);
                x[static_cast<Eigen::Index>(shear_stress(a, b, mi[0], mi[1], mi[2]))] = f[n];
            }
        }
    }
    return x;
}

void UnknownMap::decode(const Eigen::Ref<const Eigen::VectorXd>& x, StressFields& s, DisplacementFields& w) const
{
    if (static_cast<std::size_t>(x.size()) != size_) {
        throw std::invalid_argument("UnknownMap::decode: vector length mismatch");
    }
    s = StressFields::zeros(grid_);
    w = DisplacementFields::zeros(grid_);
    const int d = dims();
    for (int a = 0; a < d; ++a) {
        auto& f = s.normal[static_cast<std::size_t>(a)];
        for (std::size_t n = 0; n < f.size(); ++n) {
            const auto mi = f.multi_index(n);
            f[n] = x[static_cast<Eigen::Index>(normal_stress(a, mi[0], mi[1], mi[2]))];
        }
        auto& u = w.comp[static_cast<std::size_t>(a)];
        for (std::size_t n = 0; n < u.size(); ++n) {
            const auto mi = u.multi_index(n);
            const auto idx = displacement(a, mi[0], mi[1], mi[2]);
            u[n] = idx >= 0 ? x[idx] : 0.0;
        }
    }
    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b) {
            auto& f = s.shear_component(a, b);
            for (std::size_t n = 0; n < f.size(); ++n) {
                const auto mi = f.multi_index(n);
                f[n] = x[static_cast<Eigen::Index>(shear_stress(a, b, mi[0], mi[1], mi[2]))];
            }
        }
    }
}

namespace {

// Product of per-axis widths of a location index: dual widths along
// node-type axes, cell widths along cell-type axes.
double control_volume(const TensorGrid& g, GridLocation loc, const std::array<std::size_t, 3>& mi)
{
    double v = 1.0;
    for (int ax = 0; ax < g.dims(); ++ax) {
        const auto& p = g.axis(ax);
        const std::size_t i = mi[static_cast<std::size_t>(ax)];
        v *= is_node_type(loc, ax) ? p.dual_width(i) : p.cell_width(i);
    }
    return v;
}

using Triplet = Eigen::Triplet<double, std::ptrdiff_t>;

void check_force(const GridPtr& grid, const DisplacementFields& force)
{
    if (force.dims() != grid->dims()) {
        throw std::invalid_argument("assemble: body force has wrong number of components");
    }
    for (int a = 0; a < grid->dims(); ++a) {
        const auto& f = force.comp[static_cast<std::size_t>(a)];
        if (f.location() != face_location(a) || !(f.grid() == grid || *f.grid() == *grid)) {
            throw std::invalid_argument("assemble: body force component " + std::to_string(a) +
                                        " is not sampled on the matching face family of this grid");
        }
    }
}

}  // namespace

MacSystem assemble(const GridPtr& grid, const LameParameters& params, const DisplacementFields& force)
{
    params.validate();
    check_force(grid, force);
    const TensorGrid& g = *grid;
    const int d = g.dims();
    UnknownMap map(grid);

    const double inv2mu = 1.0 / (2.0 * params.mu);
    const double kappa = params.compliance_ratio(d);

    std::vector<Triplet> trip;
    trip.reserve(map.size() * 8);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(map.size()));

    auto add = [&](std::size_t row, std::ptrdiff_t col, double v) {
        if (col >= 0) {
            trip.emplace_back(static_cast<std::ptrdiff_t>(row), col, v);
        }
    };
    auto shifted = [](std::array<std::size_t, 3> mi, int ax, std::ptrdiff_t delta) {
        mi[static_cast<std::size_t>(ax)] =
            static_cast<std::size_t>(static_cast<std::ptrdiff_t>(mi[static_cast<std::size_t>(ax)]) + delta);
        return mi;
    };

    // Constitutive rows for the normal stresses, one per cell and axis:
    //   V [ (Z^aa - kappa tr Z) / (2 mu) - d_a W^a ] = 0.
    {
        const StaggeredField cells(grid, GridLocation::kCell);
        for (std::size_t n = 0; n < cells.size(); ++n) {
            const auto mi = cells.multi_index(n);
            const double vol = control_volume(g, GridLocation::kCell, mi);
            for (int a = 0; a < d; ++a) {
                const std::size_t row = map.normal_stress(a, mi[0], mi[1], mi[2]);
                for (int b = 0; b < d; ++b) {
                    const double c = inv2mu * ((a == b ? 1.0 : 0.0) - kappa) * vol;
                    add(row, static_cast<std::ptrdiff_t>(map.normal_stress(b, mi[0], mi[1], mi[2])), c);
                }
                const double area = vol / g.axis(a).cell_width(mi[static_cast<std::size_t>(a)]);
                const auto up = shifted(mi, a, 1);
                add(row, map.displacement(a, up[0], up[1], up[2]), -area);
                add(row, map.displacement(a, mi[0], mi[1], mi[2]), area);
            }
        }
    }

    // Constitutive rows for the shear stresses, one per node (2D) or edge (3D):
    //   V [ Z^ab / mu - (D_b W^a + D_a W^b) ] = 0,
    // with zero displacement traces beyond the boundary.
    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b) {
            const GridLocation loc = shear_location(a, b, d);
            const StaggeredField edges(grid, loc);
            for (std::size_t n = 0; n < edges.size(); ++n) {
                const auto mi = edges.multi_index(n);
                const std::size_t row = map.shear_stress(a, b, mi[0], mi[1], mi[2]);
                const double vol = control_volume(g, loc, mi);
                add(row, static_cast<std::ptrdiff_t>(row), vol / params.mu);
                // D_q W^p for (p, q) = (a, b) and (b, a); W^p is cell-type along q.
                for (auto [p, q] : {std::pair{a, b}, std::pair{b, a}}) {
                    const std::size_t j = mi[static_cast<std::size_t>(q)];
                    const double c = vol / g.axis(q).dual_width(j);
                    if (j < g.cells(q)) {
                        add(row, map.displacement(p, mi[0], mi[1], mi[2]), -c);
                    }
                    if (j > 0) {
                        const auto lo = shifted(mi, q, -1);
                        add(row, map.displacement(p, lo[0], lo[1], lo[2]), c);
                    }
                }
            }
        }
    }

    // Momentum rows at interior faces:
    //   V [ D_a Z^aa + sum_{b != a} d_b Z^ab ] = V f^a.
    for (int a = 0; a < d; ++a) {
        const GridLocation loc = face_location(a);
        const auto& fa = force.comp[static_cast<std::size_t>(a)];
        for (std::size_t n = 0; n < fa.size(); ++n) {
            const auto mi = fa.multi_index(n);
            const auto row_signed = map.displacement(a, mi[0], mi[1], mi[2]);
            if (row_signed < 0) {
                continue;
            }
            const auto row = static_cast<std::size_t>(row_signed);
            const double vol = control_volume(g, loc, mi);
            rhs[row_signed] = vol * fa[n];

            const std::size_t i = mi[static_cast<std::size_t>(a)];
            const double ca = vol / g.axis(a).dual_width(i);
            const auto lo = shifted(mi, a, -1);
            add(row, static_cast<std::ptrdiff_t>(map.normal_stress(a, mi[0], mi[1], mi[2])), ca);
            add(row, static_cast<std::ptrdiff_t>(map.normal_stress(a, lo[0], lo[1], lo[2])), -ca);

            for (int b = 0; b < d; ++b) {
                if (b == a) {
                    continue;
                }
                const std::size_t j = mi[static_cast<std::size_t>(b)];
                const double cb = vol / g.axis(b).cell_width(j);
                const auto up = shifted(mi, b, 1);
                add(row, static_cast<std::ptrdiff_t>(map.shear_stress(a, b, up[0], up[1], up[2])), cb);
                add(row, static_cast<std::ptrdiff_t>(map.shear_stress(a, b, mi[0], mi[1], mi[2])), -cb);
            }
        }
    }

    SparseMatrix m(static_cast<std::ptrdiff_t>(map.size()), static_cast<std::ptrdiff_t>(map.size()));
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    return MacSystem{std::move(m), std::move(rhs), std::move(map), params};
}

MacSystem assemble_2d(const GridPtr& grid, const LameParameters& params, const StaggeredField& f1,
                      const StaggeredField& f2)
{
    if (grid->dims() != 2) {
        throw std::invalid_argument("assemble_2d: grid is not two dimensional");
    }
    return assemble(grid, params, DisplacementFields{{f1, f2}});
}

MacSystem assemble_3d(const GridPtr& grid, const LameParameters& params, const StaggeredField& f1,
                      const StaggeredField& f2, const StaggeredField& f3)
{
    if (grid->dims() != 3) {
        throw std::invalid_argument("assemble_3d: grid is not three dimensional");
    }
    return assemble(grid, params, DisplacementFields{{f1, f2, f3}});
}

Eigen::VectorXd row_scales(const UnknownMap& map)
{
    const auto& g = *map.grid();
    Eigen::VectorXd s(static_cast<Eigen::Index>(map.size()));
    for (const auto& blk : map.blocks()) {
        for (std::size_t r = 0; r < blk.count; ++r) {
            std::size_t t = r;
            std::array<std::size_t, 3> mi{};
            mi[0] = t % blk.extents[0];
            t /= blk.extents[0];
            mi[1] = t % blk.extents[1];
            mi[2] = t / blk.extents[1];
            if (blk.kind == UnknownBlock::Kind::kDisplacement) {
                mi[static_cast<std::size_t>(blk.a)] += 1;
            }
            s[static_cast<Eigen::Index>(blk.offset + r)] = control_volume(g, blk.location, mi);
        }
    }
    return s;
}

double bilinear_a(const StressFields& z, const StressFields& t, const LameParameters& params)
{
    params.validate();
    const int d = z.dims();
    if (t.dims() != d) {
        throw std::invalid_argument("bilinear_a: dimension mismatch");
    }
    const double kappa = params.compliance_ratio(d);
    double shear = 0.0;
    for (std::size_t s = 0; s < z.shear.size(); ++s) {
        shear += inner_product(z.shear[s], t.shear[s]);
    }
    double diag = 0.0;
    double all = 0.0;
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            const double ip = inner_product(z.normal[static_cast<std::size_t>(a)], t.normal[static_cast<std::size_t>(b)]);
            all += ip;
            if (a == b) {
                diag += ip;
            }
        }
    }
    return shear / params.mu + (diag - kappa * all) / (2.0 * params.mu);
}

double bilinear_b(const StressFields& t, const DisplacementFields& w)
{
    require_zero_boundary(w);
    const int d = w.dims();
    double sum = 0.0;
    for (int a = 0; a < d; ++a) {
        auto div = dual_diff(t.normal[static_cast<std::size_t>(a)], a);
        for (int b = 0; b < d; ++b) {
            if (b != a) {
                div += forward_diff(t.shear_component(a, b), b);
            }
        }
        sum += inner_product(w.comp[static_cast<std::size_t>(a)], div);
    }
    return sum;
}

double load_form(const DisplacementFields& f, const DisplacementFields& v)
{
    double sum = 0.0;
    for (std::size_t a = 0; a < f.comp.size(); ++a) {
        sum += inner_product(f.comp[a], v.comp[a]);
    }
    return sum;
}

StressFields lbb_witness(const DisplacementFields& w)
{
    require_zero_boundary(w);
    const auto& grid = w.comp.front().grid();
    StressFields t = StressFields::zeros(grid);
    const int d = w.dims();
    for (int a = 0; a < d; ++a) {
        const auto& v = w.comp[static_cast<std::size_t>(a)];
        auto& tau = t.normal[static_cast<std::size_t>(a)];
        const auto& p = grid->axis(a);
        for (std::size_t n = 0; n < tau.size(); ++n) {
            const auto mi = tau.multi_index(n);
            const std::size_t i = mi[static_cast<std::size_t>(a)];
            if (i != 0) {
                continue;
            }
            // Walk the line through this transverse index.
            double running = 0.0;
            for (std::size_t c = 0; c < p.cells(); ++c) {
                auto face = mi;
                auto cell = mi;
                face[static_cast<std::size_t>(a)] = c;
                cell[static_cast<std::size_t>(a)] = c;
                if (c > 0) {
                    running += v(face[0], face[1], face[2]) * p.dual_width(c);
                }
                tau(cell[0], cell[1], cell[2]) = running;
            }
        }
    }
    return t;
}

void write_coo(std::ostream& os, const MacSystem& sys)
{
    const auto& m = sys.matrix;
    const auto old = os.precision(std::numeric_limits<double>::max_digits10);
    os << "% " << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
    for (std::ptrdiff_t r = 0; r < m.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
            os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
        }
    }
    os.precision(old);
}

}  // namespace macelast
