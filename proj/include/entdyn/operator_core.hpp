#pragma once

// Dense complex linear algebra for finite-dimensional Hilbert spaces:
// operators, states, tensor products, partial traces, Hermitian propagators.
//
// Conventions used throughout the library:
//   * hbar = 1; all frequencies and couplings are angular frequencies.
//   * Bipartite tensor layout is subsystem-I major: the global index of the
//     pair (a, c) with a in subsystem I and c in subsystem II is a*n_II + c.
//   * Spin basis: index 0 is the sigma_z = +1 eigenstate.

#include <complex>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace entdyn {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;
using RealMat = Eigen::MatrixXd;

inline constexpr double HERMITICITY_TOL = 1e-10;
inline constexpr double TRACE_TOL = 1e-10;
inline constexpr double UNITARITY_TOL = 1e-10;
inline constexpr double STATE_NORM_TOL = 1e-9;

enum class Subsystem { I, II };

// Normalized pure state. The public constructor enforces unit norm; the
// unchecked factory is for integrators that monitor norm drift themselves.
struct StateVector {
    Vec amps;

    explicit StateVector(Vec a);
    static StateVector unchecked(Vec a);

    int dim() const { return static_cast<int>(amps.size()); }
    double norm() const { return amps.norm(); }

  private:
    StateVector() = default;
};

// Unit-trace positive-semidefinite Hermitian matrix.
struct DensityMatrix {
    Mat rho;

    explicit DensityMatrix(Mat m);

    int dim() const { return static_cast<int>(rho.rows()); }
};

bool is_hermitian(const Mat& m, double tol = HERMITICITY_TOL);
void require_hermitian(const Mat& m, double tol, const std::string& what);

// Largest |eigenvalue| of a Hermitian operator (spectral norm).
double operator_norm(const Mat& h);

// Kronecker products with the subsystem-I-major index layout.
Mat tensor_product(const Mat& a, const Mat& b);
Vec tensor_product(const Vec& a, const Vec& b);

// Trace out one subsystem of a state on a n_I * n_II dimensional space.
DensityMatrix partial_trace(const DensityMatrix& rho, int n_i, int n_ii, Subsystem keep);
Mat partial_trace_raw(const Mat& rho, int n_i, int n_ii, Subsystem keep);

// Reduced density of a pure state, straight from the amplitudes (no full
// d x d density is formed).
DensityMatrix reduced_density(const StateVector& psi, int n_i, int n_ii, Subsystem keep);

// Tr{rho^2}; 1 for pure states, 1/n for the maximally mixed state.
double purity(const DensityMatrix& rho);

// U = exp(-i h dt) through the Hermitian eigendecomposition of h.
// Rejects non-Hermitian h; the result is unitary to UNITARITY_TOL.
Mat propagator(const Mat& h, double dt);

Mat commutator(const Mat& a, const Mat& b);
Mat dagger(const Mat& a);
Cplx expectation(const Mat& a, const StateVector& psi);

Mat identity(int n);
Mat pauli_x();
Mat pauli_y();
Mat pauli_z();
Mat sigma_plus();   // |0><1|, raises sigma_z from -1 to +1
Mat sigma_minus();  // |1><0|
Mat annihilation(int n_cut);
Mat creation(int n_cut);

StateVector basis_state(int dim, int k);
DensityMatrix pure_density(const StateVector& psi);

// Seeded random inputs for property tests and witness scans.
Mat random_hermitian(int n, std::mt19937_64& rng);
StateVector random_state(int n, std::mt19937_64& rng);
DensityMatrix random_density(int n, std::mt19937_64& rng);

}  // namespace entdyn
