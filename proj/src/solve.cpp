#include "macelast/solve.hpp"

#include <Eigen/CholmodSupport>
#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

namespace macelast {

SolverBackend parse_backend(const std::string& name)
{
    if (name == "auto") return SolverBackend::kAuto;
    if (name == "direct") return SolverBackend::kDirect;
    if (name == "iterative") return SolverBackend::kIterative;
    throw std::invalid_argument("unknown solver backend '" + name + "' (expected auto, direct or iterative)");
}

std::string to_string(SolverBackend b)
{
    switch (b) {
    case SolverBackend::kAuto: return "auto";
    case SolverBackend::kDirect: return "direct";
    case SolverBackend::kIterative: return "iterative";
    }
    return "?";
}

void Solution::decode(const UnknownMap& map, StressFields& stress, DisplacementFields& disp) const
{
    map.decode(x, stress, disp);
}

double residual(const MacSystem& sys, const Eigen::Ref<const Eigen::VectorXd>& x)
{
    if (x.size() != sys.rhs.size()) {
        throw std::invalid_argument("residual: vector length " + std::to_string(x.size()) + " does not match system size " +
                                    std::to_string(sys.rhs.size()));
    }
    const double r = (sys.matrix * x - sys.rhs).norm();
    const double b = sys.rhs.norm();
    if (b == 0.0) {
        return r == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return r / b;
}

namespace {

using ColMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Saddle-point blocks of the row-scaled system and the exact inverse of the
// compliance block.
struct Blocks {
    Eigen::Index ns = 0;
    Eigen::Index nw = 0;
    ColMatrix a_inv;  // ns x ns
    ColMatrix b;      // nw x ns
    ColMatrix bt;     // ns x nw
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i)
{
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

Blocks split_blocks(const MacSystem& sys)
{
    Blocks blk;
    blk.ns = static_cast<Eigen::Index>(sys.map.stress_size());
    blk.nw = static_cast<Eigen::Index>(sys.map.displacement_size());
    const auto ns = static_cast<std::size_t>(blk.ns);
    const auto& m = sys.matrix;

    std::vector<Triplet> a_trip;
    std::vector<Triplet> b_trip;
    std::vector<std::size_t> parent(ns);
    std::iota(parent.begin(), parent.end(), std::size_t{0});

    for (std::ptrdiff_t r = 0; r < m.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
            const auto row = static_cast<std::size_t>(it.row());
            const auto col = static_cast<std::size_t>(it.col());
            if (row < ns && col < ns) {
                a_trip.emplace_back(static_cast<int>(row), static_cast<int>(col), it.value());
                const auto ra = find_root(parent, row);
                const auto rb = find_root(parent, col);
                if (ra != rb) {
                    parent[ra] = rb;
                }
            } else if (row >= ns && col < ns) {
                b_trip.emplace_back(static_cast<int>(row - ns), static_cast<int>(col), it.value());
            } else if (row >= ns && col >= ns && it.value() != 0.0) {
                throw std::invalid_argument("solve: displacement-displacement block is not zero");
            }
        }
    }

    // Group the coupled stress unknowns (one cell's normal stresses, or a
    // single shear unknown) and invert each group densely.
    std::vector<std::vector<std::size_t>> groups;
    {
        std::vector<std::ptrdiff_t> group_of(ns, -1);
        for (std::size_t i = 0; i < ns; ++i) {
            const auto root = find_root(parent, i);
            if (group_of[root] < 0) {
                group_of[root] = static_cast<std::ptrdiff_t>(groups.size());
                groups.emplace_back();
            }
            groups[static_cast<std::size_t>(group_of[root])].push_back(i);
        }
    }
    ColMatrix a(blk.ns, blk.ns);
    a.setFromTriplets(a_trip.begin(), a_trip.end());

    std::vector<Triplet> inv_trip;
    inv_trip.reserve(a_trip.size());
    for (const auto& grp : groups) {
        const auto k = static_cast<Eigen::Index>(grp.size());
        Eigen::MatrixXd local(k, k);
        for (Eigen::Index p = 0; p < k; ++p) {
            for (Eigen::Index q = 0; q < k; ++q) {
                local(p, q) = a.coeff(static_cast<Eigen::Index>(grp[static_cast<std::size_t>(p)]),
                                      static_cast<Eigen::Index>(grp[static_cast<std::size_t>(q)]));
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(local);
        const double scale = local.cwiseAbs().maxCoeff();
        if (scale == 0.0 || !lu.isInvertible() ||
            lu.maxPivot() == 0.0 ||
            std::abs(lu.matrixLU().diagonal().cwiseAbs().minCoeff()) <= 1e-14 * scale) {
            const std::size_t row = grp.front();
            throw SingularMatrixError(row, "solve: singular compliance block at row " + std::to_string(row) + " (" +
                                               sys.map.describe(row) + ")");
        }
        const Eigen::MatrixXd inv = lu.inverse();
        for (Eigen::Index p = 0; p < k; ++p) {
            for (Eigen::Index q = 0; q < k; ++q) {
                inv_trip.emplace_back(static_cast<int>(grp[static_cast<std::size_t>(p)]),
                                      static_cast<int>(grp[static_cast<std::size_t>(q)]), inv(p, q));
            }
        }
    }
    blk.a_inv.resize(blk.ns, blk.ns);
    blk.a_inv.setFromTriplets(inv_trip.begin(), inv_trip.end());
    blk.b.resize(blk.nw, blk.ns);
    blk.b.setFromTriplets(b_trip.begin(), b_trip.end());
    blk.bt = blk.b.transpose();
    return blk;
}

ColMatrix schur_complement(const Blocks& blk)
{
    ColMatrix tmp = blk.a_inv * blk.bt;
    ColMatrix s = blk.b * tmp;
    s.prune(0.0);
    return s;
}

[[noreturn]] void report_singular_schur(const MacSystem& sys, const ColMatrix& s, Eigen::Index ns)
{
    Eigen::SimplicialLDLT<ColMatrix> ldlt(s);
    // On an exact zero pivot the factorization stops there and the later
    // entries of D are left unset, so scan in elimination order.
    Eigen::Index pivot = 0;
    const Eigen::VectorXd dvec = ldlt.vectorD();
    double dmax = 0.0;
    for (Eigen::Index k = 0; k < dvec.size(); ++k) {
        dmax = std::max(dmax, std::abs(dvec[k]));
        if (!(dvec[k] > 1e-14 * dmax)) {
            pivot = ldlt.permutationPinv().indices()[k];
            break;
        }
    }
    const auto row = static_cast<std::size_t>(ns + pivot);
    throw SingularMatrixError(row, "solve_direct: zero pivot in the displacement Schur complement at row " +
                                       std::to_string(row) + " (" + sys.map.describe(row) + ")");
}

}  // namespace

Solution solve_direct(const MacSystem& sys, double tol)
{
    const Blocks blk = split_blocks(sys);
    const Eigen::Index ns = blk.ns;
    const Eigen::Index nw = blk.nw;
    const Eigen::Index n = ns + nw;

    Solution sol;
    sol.backend = "direct";
    sol.x = Eigen::VectorXd::Zero(n);
    if (sys.rhs.norm() == 0.0) {
        return sol;
    }

    std::optional<Eigen::CholmodSupernodalLLT<ColMatrix, Eigen::Lower>> chol;
    ColMatrix s;
    if (nw > 0) {
        s = schur_complement(blk);
        chol.emplace();
        chol->compute(s);
        if (chol->info() != Eigen::Success) {
            report_singular_schur(sys, s, ns);
        }
    }

    // K [z; w] = [r1; r2]  <=>  S w = B A^-1 r1 - r2,  z = A^-1 (r1 - B^T w).
    auto apply_inverse = [&](const Eigen::VectorXd& r) {
        Eigen::VectorXd out(n);
        const Eigen::VectorXd ar1 = blk.a_inv * r.head(ns);
        Eigen::VectorXd w = Eigen::VectorXd::Zero(nw);
        if (nw > 0) {
            w = chol->solve(blk.b * ar1 - r.tail(nw));
        }
        out.head(ns) = ar1 - blk.a_inv * (blk.bt * w);
        out.tail(nw) = w;
        return out;
    };

    // Refinement continues past the residual target while the corrections
    // still shrink, which tightens the forward error of badly conditioned
    // (large lambda) systems at the cost of a few cheap solves.
    constexpr int kMaxRefinement = 8;
    Eigen::VectorXd r = sys.rhs;
    double res = 1.0;
    Eigen::VectorXd best = sol.x;
    double best_res = std::numeric_limits<double>::infinity();
    double prev_step = std::numeric_limits<double>::infinity();
    for (int step = 0; step < kMaxRefinement; ++step) {
        const Eigen::VectorXd dx = apply_inverse(r);
        sol.x += dx;
        r = sys.rhs - sys.matrix * sol.x;
        res = r.norm() / sys.rhs.norm();
        sol.iterations = step + 1;
        const double step_norm = dx.norm();
        if (res <= tol || res < best_res) {
            best_res = std::min(res, best_res);
            best = sol.x;
        }
        const bool negligible = step_norm <= 1e-15 * sol.x.norm();
        const bool stalled = step_norm > 0.5 * prev_step;
        if (res <= tol && (negligible || stalled)) {
            break;
        }
        if (step > 0 && res > tol && stalled && res >= best_res) {
            break;
        }
        prev_step = step_norm;
    }
    sol.x = best;
    sol.residual = best_res;
    if (!(best_res <= tol)) {
        std::ostringstream msg;
        msg << "solve_direct: residual " << best_res << " above tolerance " << tol << " after refinement";
        throw NonConvergenceError(msg.str(), sol.x, best_res, sol.iterations);
    }
    return sol;
}

Solution solve_iterative(const MacSystem& sys, double tol, int max_iterations)
{
    if (!(tol > 0.0)) {
        throw std::invalid_argument("solve_iterative: tol must be positive");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(sys.size());
    Solution sol;
    sol.backend = "iterative";
    sol.x = Eigen::VectorXd::Zero(n);
    const double bnorm = sys.rhs.norm();
    if (bnorm == 0.0) {
        return sol;
    }

    const Blocks blk = split_blocks(sys);
    const Eigen::Index ns = blk.ns;
    const Eigen::Index nw = blk.nw;
    Eigen::VectorXd s_diag_inv = Eigen::VectorXd::Ones(nw);
    if (nw > 0) {
        const Eigen::VectorXd d = schur_complement(blk).diagonal();
        for (Eigen::Index i = 0; i < nw; ++i) {
            if (!(d[i] > 0.0)) {
                const auto row = static_cast<std::size_t>(ns + i);
                throw SingularMatrixError(row, "solve_iterative: displacement unknown " + sys.map.describe(row) +
                                                   " is not coupled to any stress");
            }
            s_diag_inv[i] = 1.0 / d[i];
        }
    }
    auto precondition = [&](const Eigen::VectorXd& r) {
        Eigen::VectorXd z(n);
        z.head(ns) = blk.a_inv * r.head(ns);
        z.tail(nw) = s_diag_inv.cwiseProduct(r.tail(nw));
        return z;
    };
    const auto& a = sys.matrix;

    // Preconditioned MINRES (Paige & Saunders), x0 = 0.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r1 = sys.rhs;
    Eigen::VectorXd y = precondition(r1);
    const double beta1_sq = r1.dot(y);
    if (!(beta1_sq > 0.0)) {
        throw std::runtime_error("solve_iterative: preconditioner is not positive definite");
    }
    const double beta1 = std::sqrt(beta1_sq);
    Eigen::VectorXd r2 = r1;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd w1 = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd w2 = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd v(n);
    double oldb = 0.0;
    double beta = beta1;
    double dbar = 0.0;
    double epsln = 0.0;
    double phibar = beta1;
    double cs = -1.0;
    double sn = 0.0;

    Eigen::VectorXd best = x;
    double best_res = 1.0;
    constexpr int kCheckEvery = 25;
    double target = tol;  // tightened when the estimate and the true residual disagree

    for (int itn = 1; itn <= max_iterations; ++itn) {
        v = y / beta;
        y = a * v;
        if (itn >= 2) {
            y -= (beta / oldb) * r1;
        }
        const double alfa = v.dot(y);
        y -= (alfa / beta) * r2;
        r1 = r2;
        r2 = y;
        y = precondition(r2);
        oldb = beta;
        const double beta_sq = r2.dot(y);
        if (beta_sq < 0.0) {
            throw std::runtime_error("solve_iterative: preconditioner lost positive definiteness");
        }
        beta = std::sqrt(beta_sq);

        const double oldeps = epsln;
        const double delta = cs * dbar + sn * alfa;
        const double gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        const double gamma = std::max(std::hypot(gbar, beta), std::numeric_limits<double>::min());
        cs = gbar / gamma;
        sn = beta / gamma;
        const double phi = cs * phibar;
        phibar *= sn;

        w1 = w2;
        w2 = w;
        w = (v - oldeps * w1 - delta * w2) / gamma;
        x += phi * w;

        const bool estimate_done = phibar / beta1 <= target;
        if (estimate_done || itn % kCheckEvery == 0 || beta == 0.0 || itn == max_iterations) {
            const double res = (sys.rhs - a * x).norm() / bnorm;
            if (res < best_res) {
                best_res = res;
                best = x;
            }
            if (res <= tol) {
                sol.x = x;
                sol.residual = res;
                sol.iterations = itn;
                return sol;
            }
            if (estimate_done) {
                target *= 0.1;
            }
            if (beta == 0.0) {
                throw NonConvergenceError("solve_iterative: Lanczos breakdown", best, best_res, itn);
            }
        }
    }
    std::ostringstream msg;
    msg << "solve_iterative: no convergence in " << max_iterations << " iterations (best residual " << best_res
        << ", tol " << tol << ")";
    throw NonConvergenceError(msg.str(), best, best_res, max_iterations);
}

Solution solve(const MacSystem& sys, const SolverOptions& options)
{
    switch (options.backend) {
    case SolverBackend::kDirect: return solve_direct(sys, options.tol);
    case SolverBackend::kIterative: return solve_iterative(sys, options.tol, options.max_iterations);
    case SolverBackend::kAuto:
        break;
    }
    if (sys.size() <= options.direct_limit) {
        return solve_direct(sys, options.tol);
    }
    return solve_iterative(sys, options.tol, options.max_iterations);
}

}  // namespace macelast
