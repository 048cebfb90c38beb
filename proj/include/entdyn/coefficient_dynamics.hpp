#pragma once

// Linear dynamics of the real expansion coefficients q_s = Tr{Q_s rho}.
//
// The generator of the motion is h_{s s'} = Tr{H [Q_{s'}, Q_s]}, so that
// i dq/dt = h q reproduces the von Neumann equation entry by entry. For
// Hermitian H and a Hermitian basis, h is Hermitian with purely imaginary
// entries (i times a real antisymmetric matrix), which keeps q real.
//
// The purity of subsystem I is the quadratic form <q|P|q> of the diagonal
// projector-like operator P = n_II * sum over multi-indices (i, 0); its
// commutator with h vanishes exactly iff H carries no interaction part.

#include <memory>

#include "entdyn/operator_core.hpp"
#include "entdyn/su_basis.hpp"

namespace entdyn {

struct QuasiHamiltonian {
    std::shared_ptr<const BipartiteBasis> basis;
    Mat h;  // Hermitian, purely imaginary entries

    int size() const { return static_cast<int>(h.rows()); }
};

QuasiHamiltonian build_quasi_hamiltonian(const Mat& hamiltonian,
                                         std::shared_ptr<const BipartiteBasis> basis);

// Diagonal weights: n_II on the local-I slots (i, 0), zero elsewhere.
// P/n_II is idempotent and <q|P|q> equals purity_from_coefficients(q, I).
struct PurityProjector {
    std::shared_ptr<const BipartiteBasis> basis;
    RealVec diag;

    double expectation(const CoefficientVector& q) const;
};

PurityProjector purity_projector(std::shared_ptr<const BipartiteBasis> basis);

// q(t) = exp(h t / i) q0 through the spectral decomposition of h.
CoefficientVector propagate_coefficients(const QuasiHamiltonian& hq,
                                         const CoefficientVector& q0, double t);

// Exact partition h = local_i + rest + inter over the index split
// {(i, 0)} vs everything else. inter holds only the off-block couplings.
struct BlockSplit {
    Mat local_i;
    Mat rest;
    Mat inter;
};

BlockSplit block_split(const QuasiHamiltonian& hq);

// Frobenius norm of [P, h]. Zero iff subsystem purity is conserved under H;
// strictly positive for every Hamiltonian with an interaction part.
double theorem_b_witness(const QuasiHamiltonian& hq, const PurityProjector& p);

}  // namespace entdyn
