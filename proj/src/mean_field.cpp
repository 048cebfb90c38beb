#include "entdyn/mean_field.hpp"

#include <cmath>
#include <sstream>

namespace entdyn {

HamiltonianSplit::HamiltonianSplit(Mat l_i_in, Mat l_ii_in, Mat w_in)
    : l_i(std::move(l_i_in)), l_ii(std::move(l_ii_in)), w(std::move(w_in)) {
    require_hermitian(l_i, HERMITICITY_TOL, "HamiltonianSplit L_I");
    require_hermitian(l_ii, HERMITICITY_TOL, "HamiltonianSplit L_II");
    require_hermitian(w, HERMITICITY_TOL, "HamiltonianSplit W");
    if (w.rows() != l_i.rows() * l_ii.rows()) {
        std::ostringstream os;
        os << "HamiltonianSplit: W dim " << w.rows() << " != " << l_i.rows() << "*"
           << l_ii.rows();
        throw std::invalid_argument(os.str());
    }
}

Mat HamiltonianSplit::full() const {
    return tensor_product(l_i, identity(n_ii())) + tensor_product(identity(n_i()), l_ii) + w;
}

HamiltonianSplit split_local_interaction(const Mat& h, int n_i, int n_ii) {
    if (h.rows() != static_cast<Eigen::Index>(n_i) * n_ii || h.rows() != h.cols()) {
        throw std::invalid_argument("split_local_interaction: dimension mismatch");
    }
    require_hermitian(h, HERMITICITY_TOL, "split_local_interaction");
    const double tr = h.trace().real();
    const double d = static_cast<double>(n_i) * n_ii;
    Mat l_i = partial_trace_raw(h, n_i, n_ii, Subsystem::I) / n_ii -
              (tr / (2.0 * d)) * identity(n_i);
    Mat l_ii = partial_trace_raw(h, n_i, n_ii, Subsystem::II) / n_i -
               (tr / (2.0 * d)) * identity(n_ii);
    Mat w = h - tensor_product(l_i, identity(n_ii)) - tensor_product(identity(n_i), l_ii);
    return HamiltonianSplit(std::move(l_i), std::move(l_ii), std::move(w));
}

Mat partial_expectation(const Mat& w, const StateVector& other, Subsystem target,
                        int n_i, int n_ii) {
    if (w.rows() != static_cast<Eigen::Index>(n_i) * n_ii) {
        throw std::invalid_argument("partial_expectation: dimension mismatch");
    }
    const Vec& phi = other.amps;
    if (target == Subsystem::I) {
        if (phi.size() != n_ii) {
            throw std::invalid_argument("partial_expectation: partner state dim mismatch");
        }
        Mat out = Mat::Zero(n_i, n_i);
        for (int a = 0; a < n_i; ++a) {
            for (int b = 0; b < n_i; ++b) {
                Cplx acc = 0.0;
                for (int c = 0; c < n_ii; ++c) {
                    for (int d = 0; d < n_ii; ++d) {
                        acc += std::conj(phi(c)) * w(a * n_ii + c, b * n_ii + d) * phi(d);
                    }
                }
                out(a, b) = acc;
            }
        }
        return out;
    }
    if (phi.size() != n_i) {
        throw std::invalid_argument("partial_expectation: partner state dim mismatch");
    }
    Mat out = Mat::Zero(n_ii, n_ii);
    for (int c = 0; c < n_ii; ++c) {
        for (int d = 0; d < n_ii; ++d) {
            Cplx acc = 0.0;
            for (int a = 0; a < n_i; ++a) {
                for (int b = 0; b < n_i; ++b) {
                    acc += std::conj(phi(a)) * w(a * n_ii + c, b * n_ii + d) * phi(b);
                }
            }
            out(c, d) = acc;
        }
    }
    return out;
}

Mat effective_hamiltonian(const HamiltonianSplit& split, const StateVector& other_state,
                          Subsystem target) {
    Mat eff = (target == Subsystem::I ? split.l_i : split.l_ii) +
              partial_expectation(split.w, other_state, target, split.n_i(), split.n_ii());
    require_hermitian(eff, 1e-12, "effective_hamiltonian");
    return eff;
}

namespace {

void check_step_size(const HamiltonianSplit& split, double dt) {
    const double scale =
        std::max({operator_norm(split.l_i), operator_norm(split.l_ii), operator_norm(split.w)});
    if (dt * scale > 0.1 + 1e-12) {
        std::ostringstream os;
        os << "evolve_mean_field: dt*max(||L_I||,||L_II||,||W||) = " << dt * scale
           << " exceeds the stability bound 0.1";
        throw std::invalid_argument(os.str());
    }
    if (dt <= 0.0) {
        throw std::invalid_argument("evolve_mean_field: dt must be positive");
    }
}

void check_norm_drift(double norm_i, double norm_ii, double t) {
    if (std::abs(norm_i - 1.0) > NORM_DRIFT_ABORT || std::abs(norm_ii - 1.0) > NORM_DRIFT_ABORT) {
        std::ostringstream os;
        os << "evolve_mean_field: norm drift exceeded " << NORM_DRIFT_ABORT << " at t = " << t
           << " (norm_I = " << norm_i << ", norm_II = " << norm_ii << ")";
        throw NormDriftError(os.str());
    }
}

// Derivative of the coupled system for states stacked as matrix columns; the
// effective fields are always generated by column 0 of each factor.
struct BranchDeriv {
    const HamiltonianSplit& split;
    Gauge gauge;

    void operator()(const Mat& b_i, const Mat& b_ii, Mat& d_i, Mat& d_ii) const {
        const auto ref_i = StateVector::unchecked(b_i.col(0));
        const auto ref_ii = StateVector::unchecked(b_ii.col(0));
        Mat h_i = split.l_i +
                  partial_expectation(split.w, ref_ii, Subsystem::I, split.n_i(), split.n_ii());
        Mat h_ii = split.l_ii +
                   partial_expectation(split.w, ref_i, Subsystem::II, split.n_i(), split.n_ii());
        if (gauge == Gauge::Raw) {
            // scalar local-energy phase terms of the pre-gauge equations
            const double e_ii = (ref_ii.amps.dot(split.l_ii * ref_ii.amps)).real();
            const double e_i = (ref_i.amps.dot(split.l_i * ref_i.amps)).real();
            h_i += e_ii * identity(split.n_i());
            h_ii += e_i * identity(split.n_ii());
        }
        d_i = Cplx(0.0, -1.0) * (h_i * b_i);
        d_ii = Cplx(0.0, -1.0) * (h_ii * b_ii);
    }
};

void rk4_step(const BranchDeriv& f, Mat& b_i, Mat& b_ii, double dt) {
    Mat k1i, k1ii, k2i, k2ii, k3i, k3ii, k4i, k4ii;
    f(b_i, b_ii, k1i, k1ii);
    f(b_i + 0.5 * dt * k1i, b_ii + 0.5 * dt * k1ii, k2i, k2ii);
    f(b_i + 0.5 * dt * k2i, b_ii + 0.5 * dt * k2ii, k3i, k3ii);
    f(b_i + dt * k3i, b_ii + dt * k3ii, k4i, k4ii);
    b_i += (dt / 6.0) * (k1i + 2.0 * k2i + 2.0 * k3i + k4i);
    b_ii += (dt / 6.0) * (k1ii + 2.0 * k2ii + 2.0 * k3ii + k4ii);
}

int step_count(double t_max, double dt) {
    if (t_max < 0.0) {
        throw std::invalid_argument("t_max must be >= 0");
    }
    return static_cast<int>(std::llround(t_max / dt));
}

}  // namespace

std::vector<ProductState> evolve_mean_field(const HamiltonianSplit& split,
                                            const ProductState& init, double t_max,
                                            double dt, Gauge gauge) {
    check_step_size(split, dt);
    if (init.phi_i.dim() != split.n_i() || init.phi_ii.dim() != split.n_ii()) {
        throw std::invalid_argument("evolve_mean_field: initial state dimension mismatch");
    }
    const int steps = step_count(t_max, dt);
    const BranchDeriv f{split, gauge};

    Mat b_i = init.phi_i.amps;
    Mat b_ii = init.phi_ii.amps;
    std::vector<ProductState> out;
    out.reserve(steps + 1);
    out.push_back(ProductState{init.phi_i, init.phi_ii, 0.0});
    for (int k = 1; k <= steps; ++k) {
        rk4_step(f, b_i, b_ii, dt);
        const double t = k * dt;
        check_norm_drift(b_i.col(0).norm(), b_ii.col(0).norm(), t);
        out.push_back(ProductState{StateVector::unchecked(b_i.col(0)),
                                   StateVector::unchecked(b_ii.col(0)), t});
    }
    return out;
}

std::vector<StateVector> evolve_exact(const HamiltonianSplit& split, const ProductState& init,
                                      double t_max, double dt) {
    if (init.phi_i.dim() != split.n_i() || init.phi_ii.dim() != split.n_ii()) {
        throw std::invalid_argument("evolve_exact: initial state dimension mismatch");
    }
    const int steps = step_count(t_max, dt);
    const Mat u = propagator(split.full(), dt);
    Vec psi = tensor_product(init.phi_i.amps, init.phi_ii.amps);
    psi /= psi.norm();
    std::vector<StateVector> out;
    out.reserve(steps + 1);
    out.push_back(StateVector(psi));
    for (int k = 1; k <= steps; ++k) {
        psi = u * psi;
        out.push_back(StateVector(psi));
    }
    return out;
}

std::pair<CorrelationTensor, double> correlation_beta(
    const StateVector& psi, std::shared_ptr<const BipartiteBasis> basis) {
    if (psi.dim() != basis->dim()) {
        throw std::invalid_argument("correlation_beta: state dim does not match basis");
    }
    const CoefficientVector q = expand(pure_density(psi), basis);
    const int ni2 = basis->n_i() * basis->n_i();
    const int nii2 = basis->n_ii() * basis->n_ii();
    const double scale = std::sqrt(static_cast<double>(basis->dim()));
    RealMat m(ni2, nii2);
    for (int i = 0; i < ni2; ++i) {
        for (int j = 0; j < nii2; ++j) {
            m(i, j) = q.q(basis->flat(i, j)) - scale * q.q(basis->flat(i, 0)) * q.q(basis->flat(0, j));
        }
    }
    const double beta = m.squaredNorm();
    return {CorrelationTensor{std::move(basis), std::move(m)}, beta};
}

double fidelity_sq(const StateVector& psi, const ProductState& phi) {
    if (psi.dim() != phi.phi_i.dim() * phi.phi_ii.dim()) {
        throw std::invalid_argument("fidelity_sq: dimension mismatch");
    }
    Vec prod = tensor_product(phi.phi_i.amps, phi.phi_ii.amps);
    const double nrm = prod.norm();
    if (nrm <= 0.0) {
        throw std::invalid_argument("fidelity_sq: zero product state");
    }
    const double f2 = std::norm(psi.amps.dot(prod)) / (nrm * nrm * psi.amps.squaredNorm());
    return std::min(f2, 1.0);
}

MeanFieldBranches evolve_mean_field_branches(const HamiltonianSplit& split,
                                             const Mat& seed_basis_i,
                                             const Mat& seed_basis_ii, double t_max,
                                             double dt, Gauge gauge) {
    check_step_size(split, dt);
    auto check_orthonormal = [](const Mat& b, int n, const char* name) {
        if (b.rows() != n || b.cols() != n) {
            throw std::invalid_argument(std::string("branch seed ") + name +
                                        ": expected a square basis matrix");
        }
        const double res = (b.adjoint() * b - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
        if (res > 1e-9) {
            std::ostringstream os;
            os << "branch seed " << name << ": not orthonormal (residual " << res << ")";
            throw std::invalid_argument(os.str());
        }
    };
    check_orthonormal(seed_basis_i, split.n_i(), "I");
    check_orthonormal(seed_basis_ii, split.n_ii(), "II");

    const int steps = step_count(t_max, dt);
    const BranchDeriv f{split, gauge};
    MeanFieldBranches out;
    out.split = &split;
    out.dt = dt;
    out.times.reserve(steps + 1);
    out.basis_i.reserve(steps + 1);
    out.basis_ii.reserve(steps + 1);

    Mat b_i = seed_basis_i;
    Mat b_ii = seed_basis_ii;
    out.times.push_back(0.0);
    out.basis_i.push_back(b_i);
    out.basis_ii.push_back(b_ii);
    for (int k = 1; k <= steps; ++k) {
        rk4_step(f, b_i, b_ii, dt);
        check_norm_drift(b_i.col(0).norm(), b_ii.col(0).norm(), k * dt);
        out.times.push_back(k * dt);
        out.basis_i.push_back(b_i);
        out.basis_ii.push_back(b_ii);
    }
    return out;
}

Eigen::MatrixXcd perturbative_deviation(const HamiltonianSplit& split,
                                        const MeanFieldBranches& branches, int branch,
                                        double t) {
    const int n_i = split.n_i();
    const int n_ii = split.n_ii();
    if (branch < 0 || branch >= n_i * n_ii) {
        throw std::invalid_argument("perturbative_deviation: branch index out of range");
    }
    if (branches.times.empty() || branches.split != &split) {
        throw std::invalid_argument("perturbative_deviation: branches do not match the model");
    }
    const int last = static_cast<int>(std::llround(t / branches.dt));
    if (last < 0 || last >= static_cast<int>(branches.times.size()) ||
        std::abs(branches.times[last] - t) > 1e-9) {
        throw std::invalid_argument("perturbative_deviation: t is not on the stored grid");
    }
    const int bi = branch / n_ii;
    const int bj = branch % n_ii;

    // g_ij(t_k) = <phi_ij | V | phi_ref> on the grid, V = W - <W>_I (x) 1
    // - 1 (x) <W>_II + alpha
    auto integrand = [&](int k) {
        const Mat& b_i = branches.basis_i[k];
        const Mat& b_ii = branches.basis_ii[k];
        const auto ref_i = StateVector::unchecked(b_i.col(bi));
        const auto ref_ii = StateVector::unchecked(b_ii.col(bj));
        const Mat w_i = partial_expectation(split.w, ref_ii, Subsystem::I, n_i, n_ii);
        const Mat w_ii = partial_expectation(split.w, ref_i, Subsystem::II, n_i, n_ii);
        const Cplx alpha = ref_i.amps.dot(w_i * ref_i.amps);

        const Vec phi_ref = tensor_product(ref_i.amps, ref_ii.amps);
        Vec v_ref = split.w * phi_ref;
        v_ref -= tensor_product((w_i * ref_i.amps).eval(), ref_ii.amps);
        v_ref -= tensor_product(ref_i.amps, (w_ii * ref_ii.amps).eval());
        v_ref += alpha * phi_ref;

        Eigen::MatrixXcd g(n_i, n_ii);
        for (int i = 0; i < n_i; ++i) {
            for (int j = 0; j < n_ii; ++j) {
                g(i, j) = tensor_product(b_i.col(i).eval(), b_ii.col(j).eval()).dot(v_ref);
            }
        }
        return g;
    };

    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n_i, n_ii);
    if (last > 0) {
        Eigen::MatrixXcd prev = integrand(0);
        for (int k = 1; k <= last; ++k) {
            Eigen::MatrixXcd cur = integrand(k);
            acc += (branches.dt / 2.0) * (prev + cur);
            prev = std::move(cur);
        }
    }
    return Cplx(0.0, -1.0) * acc;  // 1/(i hbar)
}

namespace {

TrajectoryPoint assemble_point(const HamiltonianSplit& split, const StateVector& view_state,
                               const StateVector& exact_state, const ProductState& mf,
                               double t, const std::shared_ptr<const BipartiteBasis>& basis) {
    TrajectoryPoint pt;
    pt.t = t;
    const DensityMatrix reduced =
        reduced_density(view_state, split.n_i(), split.n_ii(), Subsystem::I);
    pt.p = std::min(purity(reduced), 1.0);
    if (pt.p <= 0.0) {
        throw std::runtime_error("trajectory diagnostics: non-positive purity");
    }
    if (basis) {
        pt.beta = std::max(correlation_beta(view_state, basis).second, 0.0);
        pt.has_beta = true;
    }
    pt.fidelity_sq = fidelity_sq(exact_state, mf);
    if (split.n_i() == 2) {
        pt.sx = (reduced.rho * pauli_x()).trace().real();
        pt.sy = (reduced.rho * pauli_y()).trace().real();
        pt.sz = (reduced.rho * pauli_z()).trace().real();
        pt.has_bloch = true;
    }
    pt.norm_i = mf.phi_i.norm();
    pt.norm_ii = mf.phi_ii.norm();
    return pt;
}

std::vector<TrajectoryPoint> diagnostics_impl(
    const HamiltonianSplit& split, const std::vector<StateVector>& exact,
    const std::vector<ProductState>& mean_field, double dt,
    const std::shared_ptr<const BipartiteBasis>& basis, bool embed_mean_field) {
    if (exact.size() != mean_field.size()) {
        throw std::invalid_argument("trajectory diagnostics: sample counts differ");
    }
    std::vector<TrajectoryPoint> out;
    out.reserve(exact.size());
    for (size_t k = 0; k < exact.size(); ++k) {
        const double t = static_cast<double>(k) * dt;
        if (embed_mean_field) {
            Vec prod = tensor_product(mean_field[k].phi_i.amps, mean_field[k].phi_ii.amps);
            prod /= prod.norm();
            out.push_back(assemble_point(split, StateVector::unchecked(prod), exact[k],
                                         mean_field[k], t, basis));
        } else {
            out.push_back(assemble_point(split, exact[k], exact[k], mean_field[k], t, basis));
        }
    }
    return out;
}

}  // namespace

std::vector<TrajectoryPoint> trajectory_diagnostics(
    const HamiltonianSplit& split, const std::vector<StateVector>& exact,
    const std::vector<ProductState>& mean_field, double dt,
    std::shared_ptr<const BipartiteBasis> basis_or_null) {
    return diagnostics_impl(split, exact, mean_field, dt, basis_or_null, false);
}

std::vector<TrajectoryPoint> mean_field_diagnostics(
    const HamiltonianSplit& split, const std::vector<StateVector>& exact,
    const std::vector<ProductState>& mean_field, double dt,
    std::shared_ptr<const BipartiteBasis> basis_or_null) {
    return diagnostics_impl(split, exact, mean_field, dt, basis_or_null, true);
}

}  // namespace entdyn
