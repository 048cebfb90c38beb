#include "entdyn/su_basis.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "entdyn/io.hpp"

namespace entdyn {

GeneratorSet build_generators(int n) {
    if (n < 2) {
        throw std::invalid_argument("build_generators: subsystem dimension must be >= 2");
    }
    GeneratorSet gs;
    gs.n = n;
    gs.lambdas.reserve(static_cast<size_t>(n) * n - 1);

    // symmetric pair generators |k><l| + |l><k|, k < l lexicographic
    for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
            Mat m = Mat::Zero(n, n);
            m(k, l) = 1.0;
            m(l, k) = 1.0;
            gs.lambdas.push_back(std::move(m));
        }
    }
    // antisymmetric pair generators -i|k><l| + i|l><k|
    for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
            Mat m = Mat::Zero(n, n);
            m(k, l) = Cplx(0.0, -1.0);
            m(l, k) = Cplx(0.0, 1.0);
            gs.lambdas.push_back(std::move(m));
        }
    }
    // diagonal generators, normalized to Tr{lambda^2} = 2
    for (int j = 1; j < n; ++j) {
        Mat m = Mat::Zero(n, n);
        const double scale = std::sqrt(2.0 / (static_cast<double>(j) * (j + 1)));
        for (int i = 0; i < j; ++i) {
            m(i, i) = scale;
        }
        m(j, j) = -scale * j;
        gs.lambdas.push_back(std::move(m));
    }

    gs.q_ops.reserve(static_cast<size_t>(n) * n);
    gs.q_ops.push_back(Mat::Identity(n, n) / std::sqrt(static_cast<double>(n)));
    for (const Mat& lam : gs.lambdas) {
        gs.q_ops.push_back(lam / std::sqrt(2.0));
    }
    return gs;
}

BipartiteBasis::BipartiteBasis(int n_i, int n_ii) : n_i_(n_i), n_ii_(n_ii) {
    if (n_i < 2 || n_ii < 2) {
        throw std::invalid_argument("BipartiteBasis: both subsystem dims must be >= 2");
    }
    if (n_i * n_ii > 64) {
        std::ostringstream os;
        os << "BipartiteBasis: n_I*n_II = " << n_i * n_ii
           << " exceeds the supported limit of 64";
        throw std::invalid_argument(os.str());
    }
    gen_i_ = build_generators(n_i);
    gen_ii_ = build_generators(n_ii);
    ops_.reserve(static_cast<size_t>(n_i) * n_i * n_ii * n_ii);
    for (const Mat& qi : gen_i_.q_ops) {
        for (const Mat& qj : gen_ii_.q_ops) {
            ops_.push_back(tensor_product(qi, qj));
        }
    }
}

std::shared_ptr<const BipartiteBasis> BipartiteBasis::get(int n_i, int n_ii) {
    static std::mutex mtx;
    static std::map<std::pair<int, int>, std::shared_ptr<const BipartiteBasis>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(n_i, n_ii);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, std::make_shared<BipartiteBasis>(n_i, n_ii)).first;
    }
    return it->second;
}

CoefficientVector expand(const DensityMatrix& rho,
                         std::shared_ptr<const BipartiteBasis> basis) {
    if (rho.dim() != basis->dim()) {
        std::ostringstream os;
        os << "expand: rho dim " << rho.dim() << " does not match basis dim "
           << basis->dim();
        throw std::invalid_argument(os.str());
    }
    const int n = basis->size();
    RealVec q(n);
    double max_imag = 0.0;
    for (int s = 0; s < n; ++s) {
        // Tr{Q_s rho} without forming the product matrix
        const Cplx tr = basis->op(s).transpose().cwiseProduct(rho.rho).sum();
        max_imag = std::max(max_imag, std::abs(tr.imag()));
        q(s) = tr.real();
    }
    if (max_imag > 1e-9) {
        std::ostringstream os;
        os << "expand: imaginary coefficient residue " << max_imag
           << "; input is not Hermitian";
        throw std::invalid_argument(os.str());
    }
    return CoefficientVector{std::move(basis), std::move(q)};
}

Mat reconstruct_raw(const CoefficientVector& coeffs) {
    const auto& basis = *coeffs.basis;
    Mat out = Mat::Zero(basis.dim(), basis.dim());
    for (int s = 0; s < basis.size(); ++s) {
        out += coeffs.q(s) * basis.op(s);
    }
    return out;
}

DensityMatrix reconstruct(const CoefficientVector& coeffs) {
    return DensityMatrix(reconstruct_raw(coeffs));
}

RealVec reduced_coefficients(const CoefficientVector& coeffs, Subsystem which) {
    const auto& basis = *coeffs.basis;
    if (which == Subsystem::I) {
        RealVec out(basis.n_i() * basis.n_i());
        for (int i = 0; i < out.size(); ++i) {
            out(i) = coeffs.q(basis.flat(static_cast<int>(i), 0));
        }
        return out;
    }
    RealVec out(basis.n_ii() * basis.n_ii());
    for (int j = 0; j < out.size(); ++j) {
        out(j) = coeffs.q(basis.flat(0, static_cast<int>(j)));
    }
    return out;
}

double purity_from_coefficients(const CoefficientVector& coeffs, Subsystem which) {
    const auto& basis = *coeffs.basis;
    const RealVec slice = reduced_coefficients(coeffs, which);
    const double scale = (which == Subsystem::I) ? basis.n_ii() : basis.n_i();
    return scale * slice.squaredNorm();
}

void write_coefficients_csv(const CoefficientVector& coeffs, std::ostream& os) {
    const auto& basis = *coeffs.basis;
    os << "# coefficient vector over the bipartite generator basis\n";
    os << "# n_I=" << basis.n_i() << " n_II=" << basis.n_ii() << "\n";
    os << "# flat index s = i*n_II^2 + j; per subsystem, index 0 is the scaled\n";
    os << "# identity and indices 1.. follow the generalized Gell-Mann order\n";
    os << "# (symmetric pairs k<l, antisymmetric pairs k<l, diagonal)\n";
    os << "flat,i,j,value\n";
    for (int s = 0; s < basis.size(); ++s) {
        const auto [i, j] = basis.multi(s);
        os << s << ',' << i << ',' << j << ',' << fmt_g17(coeffs.q(s)) << '\n';
    }
}

}  // namespace entdyn
