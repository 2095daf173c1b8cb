#include "rcext/solve.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "rcext/analysis.hpp"
#include "rcext/trig.hpp"

namespace rcext {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Chart basis row at theta: Q(theta) = B(theta) . q.to_real().
Eigen::VectorXd chart_basis_row(const IndexSet& set, const Eigen::VectorXd& theta) {
    Eigen::VectorXd row(set.size());
    row[0] = 1.0;
    int a = 1;
    for (int i : set.pair_representatives()) {
        double arg = 0.0;
        for (int ax = 0; ax < set.dim(); ++ax) arg += set.exponent(i)[ax] * theta[ax];
        row[a++] = kSqrt2 * std::cos(arg);
        row[a++] = kSqrt2 * std::sin(arg);
    }
    return row;
}

// Precomputed quadrature data shared by objective, gradient and Hessian.
struct Workspace {
    IndexSet set;
    GridSpec grid;
    long m;
    int n;
    Eigen::MatrixXd basis;   // m x n chart basis samples
    Eigen::VectorXd pfield;  // P >= 0 on nodes

    Workspace(const IndexSet& s, const HermitianSeq& p, const GridSpec& g)
        : set(s), grid(g), m(g.node_count()), n(s.size()) {
        g.require_resolves(s, "solver");
        basis.resize(m, n);
        for (long j = 0; j < m; ++j) basis.row(j) = chart_basis_row(s, g.node(j));
        pfield = basis * p.to_real();
        const double pmax = pfield.cwiseAbs().maxCoeff();
        if (pmax <= 0.0) throw std::invalid_argument("solver: prior P is identically zero");
        if (pfield.minCoeff() < -1e-9 * pmax)
            throw std::invalid_argument("solver: prior P is negative on the grid");
        pfield = pfield.cwiseMax(0.0);
    }

    Eigen::VectorXd qfield(const Eigen::VectorXd& u) const { return basis * u; }

    // chart coordinates of (1/m) sum_j field_j B(theta_j)
    Eigen::VectorXd field_moments(const Eigen::VectorXd& field) const {
        return basis.transpose() * field / static_cast<double>(m);
    }

    Eigen::VectorXd density_moments(const Eigen::VectorXd& qf) const {
        return field_moments((pfield.array() / qf.array()).matrix());
    }

    double log_term(const Eigen::VectorXd& qf) const {
        return (pfield.array() * qf.array().log()).sum() / static_cast<double>(m);
    }

    Eigen::MatrixXd curvature(const Eigen::VectorXd& qf) const {
        const Eigen::VectorXd w =
            (pfield.array() / qf.array().square()).matrix() / static_cast<double>(m);
        return basis.transpose() * w.asDiagonal() * basis;
    }
};

struct NewtonOutcome {
    Eigen::VectorXd u;
    int iterations = 0;
    double grad_norm = 0;
    bool converged = false;
    bool stalled = false;
    bool diverged = false;
};

// Damped Newton with Armijo backtracking and a fraction-to-the-boundary rule
// on the positive part of the state (Q on the nodes, plus gamma in hard
// mode). positive_part must be affine in the state.
//
// Near-singular optima can pin the achievable gradient norm above the
// nominal tolerance (conditioning times machine epsilon); a stagnating
// iterate is accepted once the gradient has reached the numerical floor of
// 1e-6 * scale, and rejected otherwise.
template <class Value, class Grad, class Hess, class PosPart>
NewtonOutcome newton_minimize(Eigen::VectorXd u, const SolverConfig& cfg, double scale,
                              Value value, Grad grad, Hess hess, PosPart positive_part) {
    NewtonOutcome out;
    const double tol = cfg.grad_tol * scale;
    const double floor_tol = 1e-6 * scale;
    double f = value(u);
    double best_gn = std::numeric_limits<double>::infinity();
    int stagnant = 0;
    int it = 0;
    for (; it < cfg.max_newton_iters; ++it) {
        const Eigen::VectorXd g = grad(u);
        out.grad_norm = g.norm();
        if (out.grad_norm <= tol) {
            out.converged = true;
            break;
        }
        if (out.grad_norm < 0.9 * best_gn) {
            best_gn = out.grad_norm;
            stagnant = 0;
        } else if (++stagnant >= 12) {
            out.converged = out.grad_norm <= floor_tol;
            break;
        }
        Eigen::MatrixXd h = hess(u);
        Eigen::LLT<Eigen::MatrixXd> llt(h);
        double ridge = 1e-14 * (h.trace() / h.rows() + 1.0);
        while (llt.info() != Eigen::Success) {
            h.diagonal().array() += ridge;
            ridge *= 100.0;
            llt.compute(h);
        }
        const Eigen::VectorXd step = llt.solve(-g);
        const double slope = g.dot(step);

        const Eigen::VectorXd pos = positive_part(u);
        const Eigen::VectorXd dpos = positive_part(u + step) - pos;
        double t = 1.0;
        for (long j = 0; j < pos.size(); ++j)
            if (dpos[j] < 0.0) t = std::min(t, cfg.boundary_fraction * pos[j] / (-dpos[j]));

        // roundoff allowance: near the optimum the true decrease drops below
        // double resolution and a strict Armijo test would stall
        const double fuzz = 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f));
        bool accepted = false;
        while (t > 1e-16) {
            const Eigen::VectorXd cand = u + t * step;
            const double fc = value(cand);
            if (std::isfinite(fc) && fc <= f + cfg.armijo_c * t * slope + fuzz) {
                u = cand;
                f = fc;
                accepted = true;
                break;
            }
            t *= cfg.backtrack;
        }
        if (!accepted) {
            out.stalled = true;
            out.converged = out.grad_norm <= floor_tol;
            break;
        }
        if (u.cwiseAbs().maxCoeff() > 1e6) {
            out.diverged = true;
            break;
        }
    }
    out.iterations = it;
    out.u = std::move(u);
    return out;
}

// ---- singular part helpers ------------------------------------------------

// Newton polish of a local minimum of Q starting from a grid node.
Eigen::VectorXd polish_minimum(const HermitianSeq& q, Eigen::VectorXd theta) {
    for (int it = 0; it < 40; ++it) {
        const Eigen::VectorXd g = eval_poly_gradient(q, theta);
        if (g.norm() < 1e-13 * std::max(1.0, q.norm2())) break;
        const Eigen::MatrixXd h = eval_poly_hessian(q, theta);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
        Eigen::VectorXd step;
        if (ldlt.info() == Eigen::Success && ldlt.isPositive())
            step = ldlt.solve(-g);
        else
            step = -g;  // indefinite curvature: plain descent
        double t = 1.0;
        const double q0 = eval_poly(q, theta);
        while (t > 1e-12 && eval_poly(q, theta + t * step) > q0) t *= 0.5;
        if (t <= 1e-12) break;
        theta += t * step;
    }
    const double two_pi = 2.0 * std::numbers::pi;
    for (int a = 0; a < theta.size(); ++a) {
        theta[a] = std::fmod(theta[a], two_pi);
        if (theta[a] < 0) theta[a] += two_pi;
        if (theta[a] < 1e-9 || two_pi - theta[a] < 1e-9) theta[a] = 0.0;
    }
    return theta;
}

double torus_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double two_pi = 2.0 * std::numbers::pi;
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        double d = std::abs(std::fmod(a[i] - b[i], two_pi));
        d = std::min(d, two_pi - d);
        s += d * d;
    }
    return std::sqrt(s);
}

// Candidate atom locations: polished local grid minima of Q below the zero
// threshold. For d <= 2 an atom can only sit where P vanishes as well
// (otherwise P/Q would not be integrable), which separates genuine spikes
// from pole-zero cancellation.
std::vector<Eigen::VectorXd> atom_candidates(const HermitianSeq& q, const HermitianSeq& p,
                                             const GridSpec& grid) {
    const GridField qgrid = synthesize(q, grid);
    const double qmax = qgrid.values().cwiseAbs().maxCoeff();
    if (qmax <= 0) return {};
    const double prefilter = 1e-3 * qmax;
    const double zero_thresh = 1e-4 * qmax;

    const int d = grid.dim();
    const auto& shape = grid.shape();
    std::vector<long> stride(d, 1);
    for (int a = d - 2; a >= 0; --a) stride[a] = stride[a + 1] * shape[a + 1];
    const int min_shape = *std::min_element(shape.begin(), shape.end());

    std::vector<Eigen::VectorXd> cands;
    for (long j = 0; j < grid.node_count(); ++j) {
        const double v = qgrid.values()[j];
        if (v >= prefilter) continue;
        bool is_min = true;
        for (int a = 0; a < d && is_min; ++a) {
            const long ja = (j / stride[a]) % shape[a];
            const long up = j + ((ja + 1 == shape[a]) ? stride[a] * (1 - shape[a]) : stride[a]);
            const long dn = j + ((ja == 0) ? stride[a] * (shape[a] - 1) : -stride[a]);
            if (qgrid.values()[up] < v || qgrid.values()[dn] < v) is_min = false;
        }
        if (!is_min) continue;
        const Eigen::VectorXd theta = polish_minimum(q, grid.node(j));
        if (eval_poly(q, theta) > zero_thresh) continue;
        if (d <= 2 &&
            std::abs(eval_poly(p, theta)) > 1e-6 * std::max(p.norm2(), 1e-300))
            continue;
        bool dup = false;
        for (const auto& c : cands)
            if (torus_distance(c, theta) < std::numbers::pi / min_shape) dup = true;
        if (!dup) cands.push_back(theta);
    }

    const size_t cap = static_cast<size_t>(q.size() - 1);
    if (cands.size() > cap) {
        std::sort(cands.begin(), cands.end(),
                  [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
                      return eval_poly(q, a) < eval_poly(q, b);
                  });
        cands.resize(cap);
    }
    return cands;
}

// Lawson-Hanson nonnegative least squares: min ||A x - b||, x >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    const int k = static_cast<int>(a.cols());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(k);
    std::vector<bool> passive(k, false);
    Eigen::VectorXd w = a.transpose() * (b - a * x);
    const double tol = 1e-12 * (a.norm() * b.norm() + 1.0);
    for (int outer = 0; outer < 4 * k + 8; ++outer) {
        int best = -1;
        double best_w = tol;
        for (int i = 0; i < k; ++i)
            if (!passive[i] && w[i] > best_w) {
                best_w = w[i];
                best = i;
            }
        if (best < 0) break;
        passive[best] = true;
        while (true) {
            std::vector<int> idx;
            for (int i = 0; i < k; ++i)
                if (passive[i]) idx.push_back(i);
            if (idx.empty()) {
                x.setZero();
                break;
            }
            Eigen::MatrixXd ap(a.rows(), idx.size());
            for (size_t i = 0; i < idx.size(); ++i) ap.col(i) = a.col(idx[i]);
            const Eigen::VectorXd z = ap.colPivHouseholderQr().solve(b);
            if (z.minCoeff() > 0) {
                x.setZero();
                for (size_t i = 0; i < idx.size(); ++i) x[idx[i]] = z[i];
                break;
            }
            double alpha = 1.0;
            for (size_t i = 0; i < idx.size(); ++i)
                if (z[i] <= 0) alpha = std::min(alpha, x[idx[i]] / (x[idx[i]] - z[i]));
            for (size_t i = 0; i < idx.size(); ++i) x[idx[i]] += alpha * (z[i] - x[idx[i]]);
            for (size_t i = 0; i < idx.size(); ++i)
                if (x[idx[i]] <= 1e-14) passive[idx[i]] = false;
        }
        w = a.transpose() * (b - a * x);
    }
    return x;
}

// Pin Q to vanish exactly on the candidate support (least-norm coefficient
// correction); returns the chart shift applied.
double project_to_zero_set(const IndexSet& set, Eigen::VectorXd& u,
                           const std::vector<Eigen::VectorXd>& support) {
    if (support.empty()) return 0.0;
    Eigen::MatrixXd g(support.size(), set.size());
    for (size_t i = 0; i < support.size(); ++i) g.row(i) = chart_basis_row(set, support[i]);
    const Eigen::VectorXd resid = g * u;
    const Eigen::VectorXd corr = g.transpose() * (g * g.transpose()).ldlt().solve(resid);
    u -= corr;
    return corr.norm();
}

// Quadrature moments of P/Q with Q floored away from exact zeros; once Q is
// pinned to its zero set the ratio stays bounded wherever P shares the zeros.
Eigen::VectorXd ac_moment_chart(const Workspace& ws, const Eigen::VectorXd& u) {
    const Eigen::VectorXd qf = ws.qfield(u);
    const double floor = 1e-13 * std::max(qf.cwiseAbs().maxCoeff(), 1e-300);
    return ws.field_moments((ws.pfield.array() / qf.array().max(floor)).matrix());
}

using RChartFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct SeparatedParts {
    Eigen::VectorXd u;            // possibly pinned chart of q
    Eigen::VectorXd c_hat_chart;  // r - absolutely continuous moments
    std::vector<Atom> atoms;
    double fit_residual = 0;
    double projection_shift = 0;
    bool singular = false;
};

// Shared post-processing: detect the singular part, pin the zero set, split
// r into absolutely continuous moments plus atoms.
SeparatedParts separate_singular_part(const Workspace& ws, const Eigen::VectorXd& u_opt,
                                      const HermitianSeq& p, const RChartFn& r_chart_of_u) {
    SeparatedParts out;
    out.u = u_opt;
    const HermitianSeq q = HermitianSeq::from_real(ws.set, u_opt);
    const std::vector<Eigen::VectorXd> cands = atom_candidates(q, p, ws.grid);
    if (!cands.empty()) {
        Eigen::VectorXd u_proj = u_opt;
        const double shift = project_to_zero_set(ws.set, u_proj, cands);
        const Eigen::VectorXd r_chart = r_chart_of_u(u_proj);
        const Eigen::VectorXd c_hat = r_chart - ac_moment_chart(ws, u_proj);
        if (c_hat.norm() > 1e-6 * std::max(r_chart.norm(), 1e-300)) {
            out.singular = true;
            out.u = u_proj;
            out.projection_shift = shift;
            out.c_hat_chart = c_hat;
            Eigen::MatrixXd a(ws.n, static_cast<int>(cands.size()));
            for (size_t i = 0; i < cands.size(); ++i)
                a.col(i) = chart_basis_row(ws.set, cands[i]);
            const Eigen::VectorXd masses = nnls(a, c_hat);
            for (size_t i = 0; i < cands.size(); ++i)
                if (masses[i] > 0) out.atoms.push_back({cands[i], masses[i]});
            out.fit_residual = (a * masses - c_hat).norm();
            return out;
        }
    }
    const Eigen::VectorXd r_chart = r_chart_of_u(u_opt);
    out.c_hat_chart = r_chart - ws.density_moments(ws.qfield(u_opt));
    out.fit_residual = out.c_hat_chart.norm();
    return out;
}

double convergence_scale(const HermitianSeq& c) { return std::max(1.0, c.norm2()); }

void validate_inputs(const HermitianSeq& c, const HermitianSeq& p, const WeightMatrix* w,
                     const GridSpec& grid) {
    require_same_set(c, p, "solver");
    if (w && w->index_set() != c.index_set())
        throw std::invalid_argument("solver: weight on a different index set");
    grid.require_resolves(c.index_set(), "solver");
}

DualSolution finish_solution(const Workspace& ws, MatchMode mode, const HermitianSeq& c,
                             const HermitianSeq& p, const WeightMatrix* w,
                             const NewtonOutcome& res, double gamma_opt,
                             const RChartFn& r_chart_of_u) {
    const SeparatedParts sep = separate_singular_part(ws, res.u, p, r_chart_of_u);
    HermitianSeq q = HermitianSeq::from_real(ws.set, sep.u);
    HermitianSeq r = HermitianSeq::from_real(ws.set, r_chart_of_u(sep.u));
    HermitianSeq c_hat = HermitianSeq::from_real(ws.set, sep.c_hat_chart);

    DualSolution sol(mode, std::move(q), std::move(r), std::move(c_hat), ws.grid);
    sol.atoms = sep.atoms;
    sol.atom_fit_residual = sep.fit_residual;
    if (mode == MatchMode::hard) {
        // gamma is tied to q by stationarity; keep it consistent when q was pinned
        sol.gamma = sep.singular ? 0.5 * w->norm_w(sol.q - HermitianSeq::unit(ws.set))
                                 : gamma_opt;
    }
    const Eigen::VectorXd qf = ws.qfield(sep.u);
    sol.diagnostics.iterations = res.iterations;
    sol.diagnostics.grad_norm = res.grad_norm;
    sol.diagnostics.min_q_grid = qf.minCoeff();
    sol.diagnostics.max_q_grid = qf.maxCoeff();
    sol.diagnostics.converged = res.converged;
    sol.diagnostics.zero_projection_shift = sep.projection_shift;
    sol.kkt = kkt_report(sol, c, p, w, mode);
    return sol;
}

}  // namespace

SolverConfig SolverConfig::for_dim(int dim) {
    if (dim == 1) return SolverConfig(GridSpec::uniform(1, 512, true));
    return SolverConfig(GridSpec::uniform(dim, 50, true));
}

// ---- public objective/gradient/hessian ------------------------------------

double objective_soft(const HermitianSeq& q, const HermitianSeq& c, const HermitianSeq& p,
                      const WeightMatrix& w, const GridSpec& grid) {
    validate_inputs(c, p, &w, grid);
    const Workspace ws(c.index_set(), p, grid);
    const Eigen::VectorXd u = q.to_real();
    const Eigen::VectorXd qf = ws.qfield(u);
    if (qf.minCoeff() <= 0) throw std::invalid_argument("objective_soft: Q <= 0 at a grid node");
    const Eigen::VectorXd du = u - HermitianSeq::unit(c.index_set()).to_real();
    return c.to_real().dot(u) - ws.log_term(qf) + 0.5 * du.dot(w.real_form() * du);
}

HermitianSeq gradient_soft(const HermitianSeq& q, const HermitianSeq& c, const HermitianSeq& p,
                           const WeightMatrix& w, const GridSpec& grid) {
    validate_inputs(c, p, &w, grid);
    const Workspace ws(c.index_set(), p, grid);
    const Eigen::VectorXd u = q.to_real();
    const Eigen::VectorXd qf = ws.qfield(u);
    if (qf.minCoeff() <= 0) throw std::invalid_argument("gradient_soft: Q <= 0 at a grid node");
    const Eigen::VectorXd du = u - HermitianSeq::unit(c.index_set()).to_real();
    const Eigen::VectorXd g = c.to_real() - ws.density_moments(qf) + w.real_form() * du;
    return HermitianSeq::from_real(c.index_set(), g);
}

Eigen::MatrixXd hessian_soft(const HermitianSeq& q, const HermitianSeq& c, const HermitianSeq& p,
                             const WeightMatrix& w, const GridSpec& grid) {
    validate_inputs(c, p, &w, grid);
    const Workspace ws(c.index_set(), p, grid);
    const Eigen::VectorXd qf = ws.qfield(q.to_real());
    if (qf.minCoeff() <= 0) throw std::invalid_argument("hessian_soft: Q <= 0 at a grid node");
    return ws.curvature(qf) + w.real_form();
}

double objective_hard(const HermitianSeq& q, double gamma, const HermitianSeq& c,
                      const HermitianSeq& p, const WeightMatrix& w, const GridSpec& grid) {
    if (!(gamma > 0)) throw std::invalid_argument("objective_hard: gamma must be positive");
    validate_inputs(c, p, &w, grid);
    const Workspace ws(c.index_set(), p, grid);
    const Eigen::VectorXd u = q.to_real();
    const Eigen::VectorXd qf = ws.qfield(u);
    if (qf.minCoeff() <= 0) throw std::invalid_argument("objective_hard: Q <= 0 at a grid node");
    const Eigen::VectorXd du = u - HermitianSeq::unit(c.index_set()).to_real();
    const double wsq = du.dot(w.real_form() * du);
    const double c0 = c[c.index_set().zero_index()].real();
    return c.to_real().dot(u) - ws.log_term(qf) + wsq / (4.0 * gamma) + gamma - c0;
}

std::pair<HermitianSeq, double> gradient_hard(const HermitianSeq& q, double gamma,
                                              const HermitianSeq& c, const HermitianSeq& p,
                                              const WeightMatrix& w, const GridSpec& grid) {
    if (!(gamma > 0)) throw std::invalid_argument("gradient_hard: gamma must be positive");
    validate_inputs(c, p, &w, grid);
    const Workspace ws(c.index_set(), p, grid);
    const Eigen::VectorXd u = q.to_real();
    const Eigen::VectorXd qf = ws.qfield(u);
    if (qf.minCoeff() <= 0) throw std::invalid_argument("gradient_hard: Q <= 0 at a grid node");
    const Eigen::VectorXd du = u - HermitianSeq::unit(c.index_set()).to_real();
    const Eigen::VectorXd gq =
        c.to_real() - ws.density_moments(qf) + w.real_form() * du / (2.0 * gamma);
    const double ggamma = 1.0 - du.dot(w.real_form() * du) / (4.0 * gamma * gamma);
    return {HermitianSeq::from_real(c.index_set(), gq), ggamma};
}

// ---- solvers ----------------------------------------------------------------

DualSolution solve_exact(const HermitianSeq& c, const HermitianSeq& p,
                         const SolverConfig& config) {
    validate_inputs(c, p, nullptr, config.grid);
    const Workspace ws(c.index_set(), p, config.grid);
    const Eigen::VectorXd uc = c.to_real();

    auto value = [&](const Eigen::VectorXd& u) {
        const Eigen::VectorXd qf = ws.qfield(u);
        if (qf.minCoeff() <= config.positivity_margin * qf.cwiseAbs().maxCoeff())
            return std::numeric_limits<double>::infinity();
        return uc.dot(u) - ws.log_term(qf);
    };
    auto grad = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
        return uc - ws.density_moments(ws.qfield(u));
    };
    auto hess = [&](const Eigen::VectorXd& u) { return ws.curvature(ws.qfield(u)); };
    auto pos = [&](const Eigen::VectorXd& u) { return ws.qfield(u); };

    const NewtonOutcome res = newton_minimize(HermitianSeq::unit(c.index_set()).to_real(),
                                              config, convergence_scale(c), value, grad, hess,
                                              pos);
    if (res.diverged || !res.converged)
        throw SolverDivergence(
            "solve_exact: dual iteration did not converge; covariance data is outside or too "
            "close to the boundary of the positivity cone for this grid");

    auto r_of_u = [&](const Eigen::VectorXd&) { return c.to_real(); };
    return finish_solution(ws, MatchMode::exact, c, p, nullptr, res, 0.0, r_of_u);
}

DualSolution solve_soft(const HermitianSeq& c, const HermitianSeq& p, const WeightMatrix& w,
                        const SolverConfig& config) {
    validate_inputs(c, p, &w, config.grid);
    const Workspace ws(c.index_set(), p, config.grid);
    const Eigen::VectorXd uc = c.to_real();
    const Eigen::VectorXd ue = HermitianSeq::unit(c.index_set()).to_real();
    const Eigen::MatrixXd& m = w.real_form();

    auto value = [&](const Eigen::VectorXd& u) {
        const Eigen::VectorXd qf = ws.qfield(u);
        if (qf.minCoeff() <= config.positivity_margin * qf.cwiseAbs().maxCoeff())
            return std::numeric_limits<double>::infinity();
        const Eigen::VectorXd du = u - ue;
        return uc.dot(u) - ws.log_term(qf) + 0.5 * du.dot(m * du);
    };
    auto grad = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
        return uc - ws.density_moments(ws.qfield(u)) + m * (u - ue);
    };
    auto hess = [&](const Eigen::VectorXd& u) -> Eigen::MatrixXd {
        return ws.curvature(ws.qfield(u)) + m;
    };
    auto pos = [&](const Eigen::VectorXd& u) { return ws.qfield(u); };

    const NewtonOutcome res =
        newton_minimize(ue, config, convergence_scale(c), value, grad, hess, pos);
    if (!res.converged)
        throw SolverDivergence("solve_soft: Newton iteration failed to converge");

    auto r_of_u = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd { return uc + m * (u - ue); };
    return finish_solution(ws, MatchMode::soft, c, p, &w, res, 0.0, r_of_u);
}

DualSolution solve_hard(const HermitianSeq& c, const HermitianSeq& p, const WeightMatrix& w,
                        const SolverConfig& config) {
    validate_inputs(c, p, &w, config.grid);
    const Workspace ws(c.index_set(), p, config.grid);
    const IndexSet& set = c.index_set();
    const HermitianSeq e = HermitianSeq::unit(set);

    // p inside the feasibility ball: d mu = P dm is optimal
    if (w.norm_winv(p - c) <= 1.0) {
        DualSolution sol(MatchMode::hard, e, p, HermitianSeq::zero(set), ws.grid);
        const Eigen::VectorXd qf = ws.qfield(e.to_real());
        sol.diagnostics.converged = true;
        sol.diagnostics.trivial_hard_solution = true;
        sol.diagnostics.min_q_grid = qf.minCoeff();
        sol.diagnostics.max_q_grid = qf.maxCoeff();
        sol.kkt = kkt_report(sol, c, p, &w, MatchMode::hard);
        return sol;
    }

    const Eigen::VectorXd uc = c.to_real();
    const Eigen::VectorXd ue = e.to_real();
    const Eigen::MatrixXd& m = w.real_form();
    const double c0 = c[set.zero_index()].real();
    const double scale = convergence_scale(c);
    const double gamma0 = 0.1 * w.norm_w(c - p);

    // warm start: a few steps on phi(., gamma0), which is a soft functional
    // with weight W/(2 gamma0); moves q off e where the joint Hessian is
    // singular
    Eigen::VectorXd u_warm;
    {
        SolverConfig warm = config;
        warm.max_newton_iters = 25;
        warm.grad_tol = 1e-3;
        const Eigen::MatrixXd mw = m / (2.0 * gamma0);
        auto value = [&](const Eigen::VectorXd& u) {
            const Eigen::VectorXd qf = ws.qfield(u);
            if (qf.minCoeff() <= config.positivity_margin * qf.cwiseAbs().maxCoeff())
                return std::numeric_limits<double>::infinity();
            const Eigen::VectorXd du = u - ue;
            return uc.dot(u) - ws.log_term(qf) + 0.5 * du.dot(mw * du);
        };
        auto grad = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
            return uc - ws.density_moments(ws.qfield(u)) + mw * (u - ue);
        };
        auto hess = [&](const Eigen::VectorXd& u) -> Eigen::MatrixXd {
            return ws.curvature(ws.qfield(u)) + mw;
        };
        auto pos = [&](const Eigen::VectorXd& u) { return ws.qfield(u); };
        const NewtonOutcome warm_res = newton_minimize(ue, warm, scale, value, grad, hess, pos);
        if (warm_res.diverged)
            throw NoSolutionError(
                "solve_hard: iterates diverged; the feasibility ball appears not to intersect "
                "the interior of the moment cone",
                sufficient_hard_existence(c, w));
        u_warm = warm_res.u;
    }

    Eigen::VectorXd x(ws.n + 1);
    x.head(ws.n) = u_warm;
    x[ws.n] = std::max(0.5 * std::sqrt(std::max((u_warm - ue).dot(m * (u_warm - ue)), 0.0)),
                       gamma0);

    auto jvalue = [&](const Eigen::VectorXd& xv) {
        const double g = xv[ws.n];
        if (g <= 0) return std::numeric_limits<double>::infinity();
        const Eigen::VectorXd qf = ws.qfield(xv.head(ws.n));
        if (qf.minCoeff() <= config.positivity_margin * qf.cwiseAbs().maxCoeff())
            return std::numeric_limits<double>::infinity();
        const Eigen::VectorXd du = xv.head(ws.n) - ue;
        return uc.dot(xv.head(ws.n)) - ws.log_term(qf) + du.dot(m * du) / (4.0 * g) + g - c0;
    };
    auto jgrad = [&](const Eigen::VectorXd& xv) -> Eigen::VectorXd {
        const double g = xv[ws.n];
        const Eigen::VectorXd u = xv.head(ws.n);
        const Eigen::VectorXd du = u - ue;
        Eigen::VectorXd out(ws.n + 1);
        out.head(ws.n) = uc - ws.density_moments(ws.qfield(u)) + m * du / (2.0 * g);
        out[ws.n] = 1.0 - du.dot(m * du) / (4.0 * g * g);
        return out;
    };
    auto jhess = [&](const Eigen::VectorXd& xv) -> Eigen::MatrixXd {
        const double g = xv[ws.n];
        const Eigen::VectorXd u = xv.head(ws.n);
        const Eigen::VectorXd du = u - ue;
        Eigen::MatrixXd h(ws.n + 1, ws.n + 1);
        h.topLeftCorner(ws.n, ws.n) = ws.curvature(ws.qfield(u)) + m / (2.0 * g);
        h.topRightCorner(ws.n, 1) = -m * du / (2.0 * g * g);
        h.bottomLeftCorner(1, ws.n) = h.topRightCorner(ws.n, 1).transpose();
        h(ws.n, ws.n) = du.dot(m * du) / (2.0 * g * g * g);
        return h;
    };
    auto jpos = [&](const Eigen::VectorXd& xv) -> Eigen::VectorXd {
        Eigen::VectorXd pv(ws.m + 1);
        pv.head(ws.m) = ws.qfield(xv.head(ws.n));
        pv[ws.m] = xv[ws.n];
        return pv;
    };

    const NewtonOutcome res = newton_minimize(x, config, scale, jvalue, jgrad, jhess, jpos);
    if (!res.converged)
        throw NoSolutionError(
            "solve_hard: no convergence; the feasibility ball appears not to intersect the "
            "interior of the moment cone",
            sufficient_hard_existence(c, w));

    NewtonOutcome qres = res;
    qres.u = res.u.head(ws.n).eval();
    const double gamma_opt = res.u[ws.n];
    auto r_of_u = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
        const Eigen::VectorXd du = u - ue;
        const double nw = std::sqrt(std::max(du.dot(m * du), 0.0));
        if (nw <= 0) return uc;
        return uc + m * du / nw;
    };
    return finish_solution(ws, MatchMode::hard, c, p, &w, qres, gamma_opt, r_of_u);
}

// ---- singular recovery and KKT ---------------------------------------------

SingularPart recover_singular(const HermitianSeq& r, const HermitianSeq& c_hat,
                              const HermitianSeq& q, const HermitianSeq& p,
                              const GridSpec& grid) {
    require_same_set(r, c_hat, "recover_singular");
    require_same_set(r, q, "recover_singular");
    require_same_set(r, p, "recover_singular");
    SingularPart out;
    if (c_hat.norm2() <= 1e-6 * std::max(r.norm2(), 1e-300)) {
        out.fit_residual = c_hat.norm2();
        return out;
    }
    const std::vector<Eigen::VectorXd> cands = atom_candidates(q, p, grid);
    if (cands.empty()) {
        out.fit_residual = c_hat.norm2();
        return out;
    }
    const IndexSet& set = r.index_set();
    Eigen::MatrixXd a(set.size(), static_cast<int>(cands.size()));
    for (size_t i = 0; i < cands.size(); ++i) a.col(i) = chart_basis_row(set, cands[i]);
    const Eigen::VectorXd b = c_hat.to_real();
    const Eigen::VectorXd masses = nnls(a, b);
    for (size_t i = 0; i < cands.size(); ++i)
        if (masses[i] > 0) out.atoms.push_back({cands[i], masses[i]});
    out.fit_residual = (a * masses - b).norm();
    return out;
}

KktReport kkt_report(const DualSolution& sol, const HermitianSeq& c, const HermitianSeq& p,
                     const WeightMatrix* w, MatchMode mode) {
    if (mode != MatchMode::exact && !w)
        throw std::invalid_argument("kkt_report: weight required for soft/hard mode");
    const IndexSet& set = c.index_set();
    const Workspace ws(set, p, sol.grid);

    KktReport rep;
    const Eigen::VectorXd qf = ws.qfield(sol.q.to_real());
    rep.min_q_grid = qf.minCoeff();
    rep.complementary_slack = std::abs(inner_product(sol.c_hat, sol.q));

    Eigen::VectorXd atom_chart = Eigen::VectorXd::Zero(set.size());
    for (const Atom& a : sol.atoms) atom_chart += a.mass * chart_basis_row(set, a.theta);
    const Eigen::VectorXd mom = ac_moment_chart(ws, sol.q.to_real());
    rep.moment_residual = (sol.r.to_real() - mom - atom_chart).norm();

    const HermitianSeq e = HermitianSeq::unit(set);
    if (mode == MatchMode::soft) {
        rep.weight_residual = (sol.r - c - w->apply(sol.q - e)).norm2();
    } else if (mode == MatchMode::hard) {
        const double nw = w->norm_w(sol.q - e);
        rep.weight_residual = (nw * (sol.r - c) - w->apply(sol.q - e)).norm2();
        rep.gamma_residual = std::abs(sol.gamma - 0.5 * nw);
        if (!sol.diagnostics.trivial_hard_solution)
            rep.boundary_residual = std::abs(w->norm_winv(sol.r - c) - 1.0);
    } else {
        rep.weight_residual = (sol.r - c).norm2();
    }
    rep.grad_norm = sol.diagnostics.grad_norm;
    return rep;
}

}  // namespace rcext
