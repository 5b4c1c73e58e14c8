#include "macelast/ops.hpp"

#include <stdexcept>
#include <string>

namespace macelast {

namespace {

std::size_t stride(const StaggeredField& a, int axis)
{
    std::size_t s = 1;
    for (int ax = 0; ax < axis; ++ax) {
        s *= a.extent(ax);
    }
    return s;
}

// Transverse (trace) index of a multi-index with `axis` removed.
std::size_t transverse_index(const std::array<std::size_t, 3>& mi, const std::array<std::size_t, 3>& ext,
                             int axis)
{
    std::size_t t = 0;
    std::size_t s = 1;
    for (int ax = 0; ax < 3; ++ax) {
        if (ax == axis) {
            continue;
        }
        t += mi[static_cast<std::size_t>(ax)] * s;
        s *= ext[static_cast<std::size_t>(ax)];
    }
    return t;
}

void check_axis(const StaggeredField& a, int axis, bool want_node, const char* what)
{
    if (axis < 0 || axis >= a.dims()) {
        throw std::invalid_argument(std::string(what) + ": axis out of range");
    }
    if (is_node_type(a.location(), axis) != want_node) {
        throw std::invalid_argument(std::string(what) + ": " + std::string(to_string(a.location())) +
                                    " is not " + (want_node ? "node" : "cell") + "-type along axis " +
                                    std::to_string(axis));
    }
}

}  // namespace

StaggeredField forward_diff(const StaggeredField& a, int axis)
{
    check_axis(a, axis, true, "forward_diff");
    StaggeredField out(a.grid(), toggle_axis(a.location(), axis, a.dims()));
    const auto& h = a.grid()->axis(axis);
    const std::size_t sa = stride(a, axis);
    for (std::size_t n = 0; n < out.size(); ++n) {
        const auto mi = out.multi_index(n);
        const std::size_t i = mi[static_cast<std::size_t>(axis)];
        const std::size_t src = a.index(mi[0], mi[1], mi[2]);
        out[n] = (a[src + sa] - a[src]) / h.cell_width(i);
    }
    return out;
}

std::size_t trace_size(const StaggeredField& a, int axis)
{
    std::size_t s = 1;
    for (int ax = 0; ax < a.dims(); ++ax) {
        if (ax != axis) {
            s *= a.extent(ax);
        }
    }
    return s;
}

StaggeredField dual_diff(const StaggeredField& a, int axis, std::span<const double> trace_low,
                         std::span<const double> trace_high)
{
    check_axis(a, axis, false, "dual_diff");
    const std::size_t nt = trace_size(a, axis);
    if (trace_low.size() != nt || trace_high.size() != nt) {
        throw std::invalid_argument("dual_diff: boundary trace has " + std::to_string(trace_low.size()) + "/" +
                                    std::to_string(trace_high.size()) + " entries, expected " +
                                    std::to_string(nt));
    }
    StaggeredField out(a.grid(), toggle_axis(a.location(), axis, a.dims()));
    const auto& h = a.grid()->axis(axis);
    const std::size_t n_cells = h.cells();
    const std::size_t sa = stride(a, axis);
    for (std::size_t n = 0; n < out.size(); ++n) {
        auto mi = out.multi_index(n);
        const std::size_t i = mi[static_cast<std::size_t>(axis)];
        if (i == 0) {
            const std::size_t t = transverse_index(mi, out.extents(), axis);
            out[n] = (a(mi[0], mi[1], mi[2]) - trace_low[t]) / h.dual_width(0);
        } else if (i == n_cells) {
            const std::size_t t = transverse_index(mi, out.extents(), axis);
            mi[static_cast<std::size_t>(axis)] = i - 1;
            out[n] = (trace_high[t] - a(mi[0], mi[1], mi[2])) / h.dual_width(i);
        } else {
            const std::size_t hi = a.index(mi[0], mi[1], mi[2]);
            out[n] = (a[hi] - a[hi - sa]) / h.dual_width(i);
        }
    }
    return out;
}

StaggeredField dual_diff(const StaggeredField& a, int axis)
{
    const std::vector<double> zero(trace_size(a, axis), 0.0);
    return dual_diff(a, axis, zero, zero);
}

std::string SbpIdentity::name() const
{
    static constexpr char kAxis[] = {'x', 'y', 'z'};
    switch (kind) {
    case Kind::kNormalDualFirst: return std::string("normal-") + kAxis[a] + "-dual-first";
    case Kind::kNormalForwardFirst: return std::string("normal-") + kAxis[a] + "-forward-first";
    case Kind::kShear: return std::string("shear-") + kAxis[a] + kAxis[b];
    }
    return "?";
}

std::vector<SbpIdentity> sbp_identities(int dims)
{
    using K = SbpIdentity::Kind;
    std::vector<SbpIdentity> ids;
    for (int a = 0; a < dims; ++a) {
        ids.push_back({K::kNormalDualFirst, a, a});
    }
    for (int a = 0; a < dims; ++a) {
        ids.push_back({K::kNormalForwardFirst, a, a});
    }
    ids.push_back({K::kShear, 0, 1});
    if (dims == 3) {
        ids.push_back({K::kShear, 0, 2});
        ids.push_back({K::kShear, 1, 2});
    }
    return ids;
}

void require_zero_boundary(const DisplacementFields& v)
{
    for (int a = 0; a < v.dims(); ++a) {
        const auto& f = v.comp[static_cast<std::size_t>(a)];
        const std::size_t n = f.extent(a) - 1;
        for (std::size_t flat = 0; flat < f.size(); ++flat) {
            const std::size_t i = f.multi_index(flat)[static_cast<std::size_t>(a)];
            if ((i == 0 || i == n) && f[flat] != 0.0) {
                throw std::domain_error("displacement component " + std::to_string(a) +
                                        " has a nonzero boundary value at flat index " + std::to_string(flat));
            }
        }
    }
}

double adjoint_defect(const SbpIdentity& id, const DisplacementFields& v, const StressFields& t)
{
    if (v.dims() != t.dims()) {
        throw std::invalid_argument("adjoint_defect: dimension mismatch");
    }
    require_zero_boundary(v);
    using K = SbpIdentity::Kind;
    const auto sa = static_cast<std::size_t>(id.a);
    switch (id.kind) {
    case K::kNormalDualFirst:
        return inner_product(dual_diff(t.normal[sa], id.a), v.comp[sa]) +
               inner_product(t.normal[sa], forward_diff(v.comp[sa], id.a));
    case K::kNormalForwardFirst:
        return inner_product(forward_diff(v.comp[sa], id.a), t.normal[sa]) +
               inner_product(v.comp[sa], dual_diff(t.normal[sa], id.a));
    case K::kShear: {
        const auto sb = static_cast<std::size_t>(id.b);
        const auto& tab = t.shear_component(id.a, id.b);
        const auto strain = dual_diff(v.comp[sb], id.a) + dual_diff(v.comp[sa], id.b);
        return inner_product(strain, tab) + inner_product(v.comp[sb], forward_diff(tab, id.a)) +
               inner_product(v.comp[sa], forward_diff(tab, id.b));
    }
    }
    return 0.0;
}

double adjoint_scale(const SbpIdentity& id, const DisplacementFields& v, const StressFields& t)
{
    const auto sa = static_cast<std::size_t>(id.a);
    if (id.kind == SbpIdentity::Kind::kShear) {
        const auto sb = static_cast<std::size_t>(id.b);
        return norm(t.shear_component(id.a, id.b)) * (norm(v.comp[sa]) + norm(v.comp[sb]));
    }
    return norm(t.normal[sa]) * norm(v.comp[sa]);
}

}  // namespace macelast
