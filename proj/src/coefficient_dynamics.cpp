#include "entdyn/coefficient_dynamics.hpp"

#include <cmath>
#include <sstream>

namespace entdyn {

QuasiHamiltonian build_quasi_hamiltonian(const Mat& hamiltonian,
                                         std::shared_ptr<const BipartiteBasis> basis) {
    if (hamiltonian.rows() != basis->dim()) {
        std::ostringstream os;
        os << "build_quasi_hamiltonian: H dim " << hamiltonian.rows()
           << " does not match basis dim " << basis->dim();
        throw std::invalid_argument(os.str());
    }
    require_hermitian(hamiltonian, HERMITICITY_TOL, "build_quasi_hamiltonian");

    const int n = basis->size();
    Mat h(n, n);
    for (int sp = 0; sp < n; ++sp) {
        const Mat c = hamiltonian * basis->op(sp) - basis->op(sp) * hamiltonian;
        for (int s = 0; s < n; ++s) {
            // Tr{[H, Q_s'] Q_s} = Tr{H [Q_s', Q_s]}
            h(s, sp) = c.transpose().cwiseProduct(basis->op(s)).sum();
        }
    }

    const double herm = (h - h.adjoint()).cwiseAbs().maxCoeff();
    const double realpart = h.real().cwiseAbs().maxCoeff();
    if (herm > HERMITICITY_TOL || realpart > HERMITICITY_TOL) {
        std::ostringstream os;
        os << "build_quasi_hamiltonian: structure residuals (hermiticity " << herm
           << ", real part " << realpart << ") exceed " << HERMITICITY_TOL;
        throw std::runtime_error(os.str());
    }
    return QuasiHamiltonian{std::move(basis), std::move(h)};
}

PurityProjector purity_projector(std::shared_ptr<const BipartiteBasis> basis) {
    RealVec d = RealVec::Zero(basis->size());
    for (int i = 0; i < basis->n_i() * basis->n_i(); ++i) {
        d(basis->flat(i, 0)) = basis->n_ii();
    }
    return PurityProjector{std::move(basis), std::move(d)};
}

double PurityProjector::expectation(const CoefficientVector& q) const {
    if (q.basis.get() != basis.get() || q.size() != diag.size()) {
        throw std::invalid_argument("PurityProjector: basis mismatch");
    }
    return diag.cwiseProduct(q.q).dot(q.q);
}

CoefficientVector propagate_coefficients(const QuasiHamiltonian& hq,
                                         const CoefficientVector& q0, double t) {
    if (q0.basis.get() != hq.basis.get()) {
        throw std::invalid_argument("propagate_coefficients: basis mismatch");
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(hq.h);
    Vec phases(hq.size());
    for (int k = 0; k < hq.size(); ++k) {
        phases(k) = std::exp(Cplx(0.0, -es.eigenvalues()(k) * t));
    }
    const Vec qt = es.eigenvectors() *
                   (phases.asDiagonal() * (es.eigenvectors().adjoint() * q0.q.cast<Cplx>()));

    const double imag_res = qt.imag().cwiseAbs().maxCoeff();
    if (imag_res > 1e-10) {
        std::ostringstream os;
        os << "propagate_coefficients: imaginary residue " << imag_res;
        throw std::runtime_error(os.str());
    }
    RealVec out = qt.real();
    if (std::abs(out.norm() - q0.q.norm()) > 1e-10) {
        throw std::runtime_error("propagate_coefficients: norm not conserved");
    }
    return CoefficientVector{hq.basis, std::move(out)};
}

BlockSplit block_split(const QuasiHamiltonian& hq) {
    const auto& basis = *hq.basis;
    const int n = hq.size();
    const int block = basis.n_ii() * basis.n_ii();
    auto is_local = [block](int s) { return s % block == 0; };

    BlockSplit out{Mat::Zero(n, n), Mat::Zero(n, n), Mat::Zero(n, n)};
    for (int s = 0; s < n; ++s) {
        for (int sp = 0; sp < n; ++sp) {
            const bool a = is_local(s), b = is_local(sp);
            if (a && b) {
                out.local_i(s, sp) = hq.h(s, sp);
            } else if (!a && !b) {
                out.rest(s, sp) = hq.h(s, sp);
            } else {
                out.inter(s, sp) = hq.h(s, sp);
            }
        }
    }
    return out;
}

double theorem_b_witness(const QuasiHamiltonian& hq, const PurityProjector& p) {
    if (p.basis.get() != hq.basis.get()) {
        throw std::invalid_argument("theorem_b_witness: basis mismatch");
    }
    double sum = 0.0;
    for (int s = 0; s < hq.size(); ++s) {
        for (int sp = 0; sp < hq.size(); ++sp) {
            const double w = p.diag(s) - p.diag(sp);
            sum += std::norm(w * hq.h(s, sp));
        }
    }
    return std::sqrt(sum);
}

}  // namespace entdyn
