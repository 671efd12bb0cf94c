#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pucci/eigen_result.hpp"
#include "pucci/grid.hpp"
#include "pucci/pucci_core.hpp"

namespace pucci {

/// Zero-order coefficient c(x) of L = M^sign + c: a constant plus an
/// optional field on a grid sharing the lattice of the target grid.
class Potential {
public:
    Potential() = default;
    Potential(double constant) : constant_(constant) {}  // NOLINT(google-explicit-constructor)
    Potential(ScalarField field, double constant = 0.0) : constant_(constant), field_(std::move(field)) {}  // NOLINT

    double constant() const { return constant_; }
    bool has_field() const { return field_.has_value(); }
    const ScalarField& field() const { return *field_; }

    /// Node values on `g`, restricting the field when it lives on a larger grid.
    std::vector<double> values_on(const Grid2D& g) const;
    Potential shifted(double s) const;

private:
    double constant_ = 0.0;
    std::optional<ScalarField> field_;
};

/// Directional second difference along stencil direction k at a node, with
/// Shortley-Weller arms and zero boundary values.
double directional_second_difference(const Grid2D& g, std::span<const double> u, int node, int k);

/// Wide-stencil M^sign: the Pucci rule applied to the largest and smallest
/// directional second differences at each node.
ScalarField discrete_pucci(const ScalarField& u, const EllipticityPair& ell, Sign sign);
void discrete_pucci(const Grid2D& g, std::span<const double> u, const EllipticityPair& ell, Sign sign,
                    std::span<double> out);

/// Frozen controls at one node: directions with the extreme second
/// differences and the coefficients the Pucci rule gives them.
struct NodePolicy {
    int kmax = 0;
    int kmin = 0;
    double wmax = 1.0;
    double wmin = 1.0;
    bool operator==(const NodePolicy&) const = default;
};

std::vector<NodePolicy> extract_policy(const Grid2D& g, std::span<const double> u, const EllipticityPair& ell,
                                       Sign sign);

struct DirichletStats {
    int policy_rounds = 0;
    int factorizations = 0;
    double residual = 0.0;
};

/// Solver for -M^sign_h(u) - c u + shift u = rhs with zero Dirichlet data,
/// by policy iteration with sparse LU sub-solves. Keeps the last
/// factorization so repeated solves under a stable policy are cheap.
class DirichletSolver {
public:
    DirichletSolver(GridPtr grid, std::vector<double> c, double shift, const EllipticityPair& ell, Sign sign);
    ~DirichletSolver();
    DirichletSolver(DirichletSolver&&) noexcept;
    DirichletSolver& operator=(DirichletSolver&&) noexcept;

    /// Solves from an initial guess (zero when empty). Throws SolverError
    /// after 200 rounds without meeting 1e-10 (1 + |rhs|_inf).
    std::vector<double> solve(std::span<const double> rhs, std::span<const double> initial = {});

    /// Nodal residual -M_h(u) - c u + shift u - rhs.
    std::vector<double> residual(std::span<const double> u, std::span<const double> rhs) const;

    const DirichletStats& last_stats() const { return stats_; }
    double shift() const { return shift_; }
    const Grid2D& grid() const { return *grid_; }

private:
    struct Impl;
    GridPtr grid_;
    std::vector<double> c_;
    double shift_;
    EllipticityPair ell_;
    Sign sign_;
    DirichletStats stats_;
    std::unique_ptr<Impl> impl_;
};

ScalarField solve_dirichlet(const ScalarField& c, double shift, const ScalarField& rhs, const EllipticityPair& ell,
                            Sign sign);

struct GridEigenOptions {
    int max_iterations = 500;
    double rel_tol = 1e-6;  ///< stop when bracket width <= rel_tol (1 + |lambda + max c|)
};

/// lambda_1^cone(M^sign + c) on a prebuilt grid by positive-cone inverse
/// power iteration with Collatz-Wielandt brackets. The negative cone uses
/// lambda_1^-(M^sign + c) = lambda_1^+(M^-sign + c).
EigenResult principal_eigenvalue_grid(const Potential& c, const GridPtr& grid, const EllipticityPair& ell, Sign sign,
                                      Cone cone, const GridEigenOptions& opts = {});

EigenResult principal_eigenvalue_grid(const Potential& c, const DomainSpec& dom, double h, const EllipticityPair& ell,
                                      Sign sign, Cone cone, const StencilConfig& st = {},
                                      const GridEigenOptions& opts = {});

/// Sup-norm of -M_h(phi) - c phi - lambda phi.
double eigen_residual(const ScalarField& phi, const std::vector<double>& c, double lambda, const EllipticityPair& ell,
                      Sign sign);

struct RefineOutcome {
    bool converged = false;
    EigenResult result;  ///< last iterate, also when not converged
    std::string message;
    std::vector<double> residual_history;
};

struct RefineOptions {
    int max_steps = 100;
    double tol = 1e-9;  ///< on |residual|_inf / (1 + |lambda|) with sup-normalized iterate
};

/// Newton iteration on {-M_h(psi) - c psi - lambda psi = 0, psi(i*) = psi0(i*)}
/// with frozen-policy Jacobians, i* the node of largest |psi|. Non-convergence
/// is reported, not thrown.
RefineOutcome nodal_candidate_refine(double lambda0, const ScalarField& psi0, const Potential& c,
                                     const EllipticityPair& ell, Sign sign, const RefineOptions& opts = {});

/// Richardson estimate from values at h and h/2 for an order-p method;
/// `error` is the pair difference.
struct Richardson {
    double coarse = 0.0;
    double fine = 0.0;
    double extrapolated = 0.0;
    double error = 0.0;
};
Richardson richardson(double coarse, double fine, double order = 2.0);

}  // namespace pucci
