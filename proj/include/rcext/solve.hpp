#ifndef RCEXT_SOLVE_HPP
#define RCEXT_SOLVE_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rcext/grid.hpp"
#include "rcext/sequence.hpp"
#include "rcext/weight.hpp"

namespace rcext {

struct SolverConfig {
    GridSpec grid;
    int max_newton_iters = 200;
    double grad_tol = 1e-9;          // relative to max(1, ||c||)
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    double boundary_fraction = 0.99; // fraction-to-the-boundary step limit
    double positivity_margin = 1e-12;

    explicit SolverConfig(GridSpec g) : grid(std::move(g)) {}
    /// Offset grid with 512 points for d = 1 and 50 per axis for d >= 2.
    static SolverConfig for_dim(int dim);
};

enum class MatchMode { exact, soft, hard };

/// Point mass of the singular part: location on T^d and positive weight.
struct Atom {
    Eigen::VectorXd theta;
    double mass = 0;
};

struct KktReport {
    double min_q_grid = 0;           // (i) dual feasibility: min of Q on the grid
    double complementary_slack = 0;  // (ii) |<c_hat, q>|
    double moment_residual = 0;      // (iii) ||r - mom(P/Q) - c_atoms||
    double weight_residual = 0;      // (iv) soft: ||r-c-W(q-e)||; hard: ||(r-c)||q-e||_W - W(q-e)||
    double gamma_residual = 0;       // hard: |gamma - 0.5*||q-e||_W|
    double boundary_residual = 0;    // hard: | ||r-c||_{W^-1} - 1 |
    double grad_norm = 0;
};

struct SolverDiagnostics {
    int iterations = 0;
    double grad_norm = 0;
    double min_q_grid = 0;
    double max_q_grid = 0;
    bool converged = false;
    bool trivial_hard_solution = false;
    /// Coefficient shift applied when the solution is pinned to its
    /// identified zero set before the singular part is separated.
    double zero_projection_shift = 0;
};

struct DualSolution {
    DualSolution(MatchMode mode, HermitianSeq q, HermitianSeq r, HermitianSeq c_hat,
                 GridSpec grid)
        : mode(mode), q(std::move(q)), r(std::move(r)), c_hat(std::move(c_hat)),
          grid(std::move(grid)) {}

    MatchMode mode;
    HermitianSeq q, r, c_hat;
    GridSpec grid;  // quadrature grid the residuals are consistent with
    double gamma = 0;  // hard mode multiplier; 0 otherwise
    std::vector<Atom> atoms;
    double atom_fit_residual = 0;
    KktReport kkt;
    SolverDiagnostics diagnostics;
};

/// Thrown by solve_hard when the feasibility ball and the moment cone do not
/// intersect (or touch only at the boundary) as far as the iteration can tell.
class NoSolutionError : public std::runtime_error {
public:
    NoSolutionError(const std::string& msg, bool weight_condition_held)
        : std::runtime_error(msg), weight_condition_held(weight_condition_held) {}
    /// Whether the sufficient existence condition W > cc* held; when it did,
    /// the failure points at numerics rather than infeasibility.
    bool weight_condition_held;
};

/// Thrown when the exact-matching dual diverges (covariance data outside or
/// on the boundary of the cone) or an iteration breaks down.
class SolverDivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Discretized soft dual <c,q> - int P log Q dm + 0.5*||q-e||_W^2 and its
/// derivatives. Q must be strictly positive on the grid.
double objective_soft(const HermitianSeq& q, const HermitianSeq& c, const HermitianSeq& p,
                      const WeightMatrix& w, const GridSpec& grid);
HermitianSeq gradient_soft(const HermitianSeq& q, const HermitianSeq& c, const HermitianSeq& p,
                           const WeightMatrix& w, const GridSpec& grid);
/// Hessian in the real chart coordinates of HermitianSeq::to_real().
Eigen::MatrixXd hessian_soft(const HermitianSeq& q, const HermitianSeq& c, const HermitianSeq& p,
                             const WeightMatrix& w, const GridSpec& grid);

/// Joint hard dual phi(q, gamma) = <c,q> - int P log Q dm
/// + ||q-e||_W^2/(4 gamma) + gamma - c_0, for gamma > 0.
double objective_hard(const HermitianSeq& q, double gamma, const HermitianSeq& c,
                      const HermitianSeq& p, const WeightMatrix& w, const GridSpec& grid);
std::pair<HermitianSeq, double> gradient_hard(const HermitianSeq& q, double gamma,
                                              const HermitianSeq& c, const HermitianSeq& p,
                                              const WeightMatrix& w, const GridSpec& grid);

DualSolution solve_exact(const HermitianSeq& c, const HermitianSeq& p, const SolverConfig& config);
DualSolution solve_soft(const HermitianSeq& c, const HermitianSeq& p, const WeightMatrix& w,
                        const SolverConfig& config);
DualSolution solve_hard(const HermitianSeq& c, const HermitianSeq& p, const WeightMatrix& w,
                        const SolverConfig& config);

struct SingularPart {
    std::vector<Atom> atoms;
    double fit_residual = 0;
};

/// Locates the singular part: candidate support at the polished zeros of Q,
/// masses by nonnegative least squares against the moments c_hat. A fit
/// residual well above the data scale signals a grid too coarse for the
/// support structure.
SingularPart recover_singular(const HermitianSeq& r, const HermitianSeq& c_hat,
                              const HermitianSeq& q, const HermitianSeq& p,
                              const GridSpec& grid);

/// Recomputes all optimality residuals of a solution from scratch.
/// Pass w = nullptr for exact mode.
KktReport kkt_report(const DualSolution& sol, const HermitianSeq& c, const HermitianSeq& p,
                     const WeightMatrix* w, MatchMode mode);

}  // namespace rcext

#endif
