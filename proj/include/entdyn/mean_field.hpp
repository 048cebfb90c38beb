#pragma once

// Factorization (mean-field) dynamics of a bipartite system: each subsystem
// evolves under its local Hamiltonian plus the partner's expectation of the
// interaction. Includes the exact reference evolution, the correlation
// tensor M with beta = sum M^2, fidelity diagnostics, and the first-order
// deviation of the factorized solution from the exact one.

#include <memory>
#include <vector>

#include "entdyn/operator_core.hpp"
#include "entdyn/su_basis.hpp"

namespace entdyn {

// Norm drift beyond this aborts a mean-field integration.
inline constexpr double NORM_DRIFT_ABORT = 1e-6;

// Thrown when the monitored subsystem norms leave the trusted band; a
// scientific-validity failure, not an I/O one.
struct NormDriftError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bipartite model H = L_I (x) 1 + 1 (x) L_II + W, all parts Hermitian.
struct HamiltonianSplit {
    Mat l_i;
    Mat l_ii;
    Mat w;

    HamiltonianSplit(Mat l_i_in, Mat l_ii_in, Mat w_in);

    int n_i() const { return static_cast<int>(l_i.rows()); }
    int n_ii() const { return static_cast<int>(l_ii.rows()); }
    int dim() const { return n_i() * n_ii(); }
    Mat full() const;
};

// Canonical split of an arbitrary Hamiltonian: the local parts are the
// partial traces with the total trace shared evenly, W is the remainder.
// W = 0 exactly iff H is interaction-free.
HamiltonianSplit split_local_interaction(const Mat& h, int n_i, int n_ii);

struct ProductState {
    StateVector phi_i;
    StateVector phi_ii;
    double t = 0.0;
};

// Gauge choice for the coupled equations. Raw keeps the scalar local-energy
// phase terms <phi|L_other|phi>; PhaseFixed removes them by the Lorenz-like
// phase condition, leaving L_target + <phi_other|W|phi_other>. The two only
// differ by time-dependent global phases of each factor.
enum class Gauge { Raw, PhaseFixed };

// <phi_other| W |phi_other> as an operator on the target subsystem.
Mat partial_expectation(const Mat& w, const StateVector& other, Subsystem target,
                        int n_i, int n_ii);

// L_target plus the partner expectation of W; always Hermitian.
Mat effective_hamiltonian(const HamiltonianSplit& split, const StateVector& other_state,
                          Subsystem target);

// Classic fixed-step 4th-order integration of the coupled nonlinear system.
// Requires dt * max(||L_I||, ||L_II||, ||W||) <= 0.1; subsystem norms are
// monitored and never renormalized, drift beyond NORM_DRIFT_ABORT aborts.
// Samples are returned at every step, t = 0, dt, ..., t_max.
std::vector<ProductState> evolve_mean_field(const HamiltonianSplit& split,
                                            const ProductState& init, double t_max,
                                            double dt, Gauge gauge);

// Exact full-space evolution sampled at interval dt (unitary propagator
// applied repeatedly, not a step integrator).
std::vector<StateVector> evolve_exact(const HamiltonianSplit& split,
                                      const ProductState& init, double t_max, double dt);

// M_ij = q_ij - sqrt(n_I n_II) q_i0 q_0j; identically zero iff the state is
// a product. Rows/columns at index 0 vanish for unit-trace states.
struct CorrelationTensor {
    std::shared_ptr<const BipartiteBasis> basis;
    RealMat m;
};

std::pair<CorrelationTensor, double> correlation_beta(
    const StateVector& psi, std::shared_ptr<const BipartiteBasis> basis);

// |<psi|phi_I (x) phi_II>|^2 between unit rays (integration drift in phi is
// divided out; the raw norms stay visible in the trajectory diagnostics).
double fidelity_sq(const StateVector& psi, const ProductState& phi);

// Orthonormal families of subsystem states transported by the effective
// fields of the reference (column 0) trajectory. Column 0 of each factor is
// the mean-field solution itself; the other columns stay orthonormal because
// all columns share one Hermitian generator per subsystem.
struct MeanFieldBranches {
    const HamiltonianSplit* split = nullptr;
    double dt = 0.0;
    std::vector<double> times;
    std::vector<Mat> basis_i;   // n_I x n_I, columns = branch states
    std::vector<Mat> basis_ii;  // n_II x n_II
};

MeanFieldBranches evolve_mean_field_branches(const HamiltonianSplit& split,
                                             const Mat& seed_basis_i,
                                             const Mat& seed_basis_ii, double t_max,
                                             double dt, Gauge gauge);

// First-order deviation coefficients theta_ij(t) of the exact solution from
// the factorized reference branch, from the time integral of the effective
// interaction V = W - <W>_I - <W>_II + alpha over the stored trajectory grid
// (trapezoidal rule). alpha = <phi_ref|W|phi_ref> makes the reference entry
// vanish identically; the (i,0) and (0,j) entries then vanish as well.
Eigen::MatrixXcd perturbative_deviation(const HamiltonianSplit& split,
                                        const MeanFieldBranches& branches,
                                        int branch, double t);

// One sampled diagnostics record of a run; beta and the Bloch components are
// optional (beta needs n_I*n_II <= 64, Bloch needs a qubit subsystem I).
struct TrajectoryPoint {
    double t = 0.0;
    double p = 1.0;
    double beta = 0.0;
    double fidelity_sq = 1.0;
    double sx = 0.0, sy = 0.0, sz = 0.0;
    double norm_i = 1.0, norm_ii = 1.0;
    bool has_beta = false;
    bool has_bloch = false;
};

// Exact-side diagnostics: P, beta, Bloch from the exact states; fidelity
// couples the two runs; norms are the mean-field drift monitors.
std::vector<TrajectoryPoint> trajectory_diagnostics(
    const HamiltonianSplit& split, const std::vector<StateVector>& exact,
    const std::vector<ProductState>& mean_field, double dt,
    std::shared_ptr<const BipartiteBasis> basis_or_null);

// Mean-field-side diagnostics: P, beta, Bloch of the embedded product state
// (P stays 1 and beta stays 0 while the integration is healthy).
std::vector<TrajectoryPoint> mean_field_diagnostics(
    const HamiltonianSplit& split, const std::vector<StateVector>& exact,
    const std::vector<ProductState>& mean_field, double dt,
    std::shared_ptr<const BipartiteBasis> basis_or_null);

}  // namespace entdyn
