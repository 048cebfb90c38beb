#include "entdyn/operator_core.hpp"

#include <cmath>
#include <sstream>

namespace entdyn {

namespace {

void require_finite(const Mat& m, const std::string& what) {
    if (!m.allFinite()) {
        throw std::invalid_argument(what + ": non-finite entries");
    }
}

}  // namespace

StateVector::StateVector(Vec a) {
    if (a.size() < 1) {
        throw std::invalid_argument("StateVector: dimension must be >= 1");
    }
    if (!a.allFinite()) {
        throw std::invalid_argument("StateVector: non-finite amplitudes");
    }
    const double n = a.norm();
    if (std::abs(n - 1.0) > STATE_NORM_TOL) {
        std::ostringstream os;
        os << "StateVector: norm " << n << " deviates from 1 by more than " << STATE_NORM_TOL;
        throw std::invalid_argument(os.str());
    }
    amps = std::move(a);
}

StateVector StateVector::unchecked(Vec a) {
    StateVector s;
    s.amps = std::move(a);
    return s;
}

DensityMatrix::DensityMatrix(Mat m) {
    if (m.rows() < 1 || m.rows() != m.cols()) {
        throw std::invalid_argument("DensityMatrix: matrix must be square and non-empty");
    }
    require_finite(m, "DensityMatrix");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("DensityMatrix: not Hermitian within 1e-12");
    }
    if (std::abs(m.trace() - Cplx(1.0, 0.0)) > TRACE_TOL) {
        std::ostringstream os;
        os << "DensityMatrix: trace " << m.trace() << " is not 1 within " << TRACE_TOL;
        throw std::invalid_argument(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
        std::ostringstream os;
        os << "DensityMatrix: negative eigenvalue " << es.eigenvalues().minCoeff();
        throw std::invalid_argument(os.str());
    }
    rho = std::move(m);
}

bool is_hermitian(const Mat& m, double tol) {
    return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

void require_hermitian(const Mat& m, double tol, const std::string& what) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument(what + ": matrix is not square");
    }
    const double res = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (res > tol) {
        std::ostringstream os;
        os << what << ": Hermiticity residual " << res << " exceeds " << tol;
        throw std::invalid_argument(os.str());
    }
}

double operator_norm(const Mat& h) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Mat tensor_product(const Mat& a, const Mat& b) {
    require_finite(a, "tensor_product");
    require_finite(b, "tensor_product");
    const Eigen::Index ra = a.rows(), ca = a.cols(), rb = b.rows(), cb = b.cols();
    Mat out(ra * rb, ca * cb);
    for (Eigen::Index i = 0; i < ra; ++i) {
        for (Eigen::Index j = 0; j < ca; ++j) {
            out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
        }
    }
    return out;
}

Vec tensor_product(const Vec& a, const Vec& b) {
    Vec out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

Mat partial_trace_raw(const Mat& rho, int n_i, int n_ii, Subsystem keep) {
    if (rho.rows() != rho.cols() || rho.rows() != static_cast<Eigen::Index>(n_i) * n_ii) {
        std::ostringstream os;
        os << "partial_trace: operator dim " << rho.rows() << "x" << rho.cols()
           << " does not match n_I*n_II = " << n_i << "*" << n_ii;
        throw std::invalid_argument(os.str());
    }
    if (keep == Subsystem::I) {
        Mat out = Mat::Zero(n_i, n_i);
        for (int a = 0; a < n_i; ++a) {
            for (int b = 0; b < n_i; ++b) {
                for (int c = 0; c < n_ii; ++c) {
                    out(a, b) += rho(a * n_ii + c, b * n_ii + c);
                }
            }
        }
        return out;
    }
    Mat out = Mat::Zero(n_ii, n_ii);
    for (int c = 0; c < n_ii; ++c) {
        for (int d = 0; d < n_ii; ++d) {
            for (int a = 0; a < n_i; ++a) {
                out(c, d) += rho(a * n_ii + c, a * n_ii + d);
            }
        }
    }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, int n_i, int n_ii, Subsystem keep) {
    return DensityMatrix(partial_trace_raw(rho.rho, n_i, n_ii, keep));
}

DensityMatrix reduced_density(const StateVector& psi, int n_i, int n_ii, Subsystem keep) {
    if (psi.dim() != n_i * n_ii) {
        std::ostringstream os;
        os << "reduced_density: state dim " << psi.dim() << " does not match n_I*n_II = "
           << n_i << "*" << n_ii;
        throw std::invalid_argument(os.str());
    }
    Eigen::Map<const Mat> amp(psi.amps.data(), n_ii, n_i);  // column a holds subsystem II
    const double n2 = psi.amps.squaredNorm();
    if (keep == Subsystem::I) {
        return DensityMatrix(((amp.transpose() * amp.conjugate()) / n2).eval());
    }
    return DensityMatrix(((amp * amp.adjoint()) / n2).eval());
}

double purity(const DensityMatrix& rho) {
    return (rho.rho * rho.rho).trace().real();
}

Mat propagator(const Mat& h, double dt) {
    require_hermitian(h, HERMITICITY_TOL, "propagator");
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Vec phases(h.rows());
    for (Eigen::Index k = 0; k < h.rows(); ++k) {
        phases(k) = std::exp(Cplx(0.0, -es.eigenvalues()(k) * dt));
    }
    Mat u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    const double res = (u.adjoint() * u - Mat::Identity(h.rows(), h.rows())).cwiseAbs().maxCoeff();
    if (res > UNITARITY_TOL) {
        std::ostringstream os;
        os << "propagator: unitarity residual " << res;
        throw std::runtime_error(os.str());
    }
    return u;
}

Mat commutator(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("commutator: dimension mismatch");
    }
    return a * b - b * a;
}

Mat dagger(const Mat& a) { return a.adjoint(); }

Cplx expectation(const Mat& a, const StateVector& psi) {
    if (a.rows() != psi.amps.size()) {
        throw std::invalid_argument("expectation: dimension mismatch");
    }
    return psi.amps.dot(a * psi.amps);
}

Mat identity(int n) { return Mat::Identity(n, n); }

Mat pauli_x() {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Mat pauli_y() {
    Mat m(2, 2);
    m << 0, Cplx(0, -1), Cplx(0, 1), 0;
    return m;
}

Mat pauli_z() {
    Mat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Mat sigma_plus() {
    Mat m = Mat::Zero(2, 2);
    m(0, 1) = 1;
    return m;
}

Mat sigma_minus() {
    Mat m = Mat::Zero(2, 2);
    m(1, 0) = 1;
    return m;
}

Mat annihilation(int n_cut) {
    if (n_cut < 1) {
        throw std::invalid_argument("annihilation: n_cut must be >= 1");
    }
    Mat a = Mat::Zero(n_cut, n_cut);
    for (int n = 1; n < n_cut; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

Mat creation(int n_cut) { return annihilation(n_cut).adjoint(); }

StateVector basis_state(int dim, int k) {
    if (k < 0 || k >= dim) {
        throw std::invalid_argument("basis_state: index out of range");
    }
    Vec v = Vec::Zero(dim);
    v(k) = 1.0;
    return StateVector(std::move(v));
}

DensityMatrix pure_density(const StateVector& psi) {
    return DensityMatrix(psi.amps * psi.amps.adjoint());
}

Mat random_hermitian(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            m(i, j) = Cplx(g(rng), g(rng));
        }
    }
    return 0.5 * (m + m.adjoint()).eval();
}

StateVector random_state(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(n);
    for (int i = 0; i < n; ++i) {
        v(i) = Cplx(g(rng), g(rng));
    }
    v /= v.norm();
    return StateVector(std::move(v));
}

DensityMatrix random_density(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            m(i, j) = Cplx(g(rng), g(rng));
        }
    }
    Mat rho = m * m.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(std::move(rho));
}

}  // namespace entdyn
