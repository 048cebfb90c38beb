#pragma once

// SU(n) generator bases and the induced bipartite operator basis.
//
// The generator order is fixed so that coefficient files stay comparable:
// generalized Gell-Mann matrices, all symmetric pair generators (k < l,
// lexicographic), then all antisymmetric pair generators, then the diagonal
// ones. For n = 2 this yields sigma_x, sigma_y, sigma_z.
//
// The bipartite basis flattens the multi-index (i, j) as s = i*n_II^2 + j,
// matching the subsystem-I-major Hilbert-space layout.

#include <memory>
#include <ostream>
#include <vector>

#include "entdyn/operator_core.hpp"

namespace entdyn {

struct GeneratorSet {
    int n = 0;
    std::vector<Mat> lambdas;  // n^2 - 1 traceless Hermitian generators
    std::vector<Mat> q_ops;    // n^2 orthonormal ops: 1/sqrt(n), lambda_i/sqrt(2)
};

// Generalized Gell-Mann construction; rejects n < 2.
GeneratorSet build_generators(int n);

class BipartiteBasis {
  public:
    BipartiteBasis(int n_i, int n_ii);

    // Cached shared instances; the basis holds n_I^2*n_II^2 dense matrices of
    // size (n_I*n_II)^2, so construction is refused above n_I*n_II = 64.
    static std::shared_ptr<const BipartiteBasis> get(int n_i, int n_ii);

    int n_i() const { return n_i_; }
    int n_ii() const { return n_ii_; }
    int dim() const { return n_i_ * n_ii_; }
    int size() const { return static_cast<int>(ops_.size()); }

    int flat(int i, int j) const { return i * n_ii_ * n_ii_ + j; }
    std::pair<int, int> multi(int s) const {
        const int block = n_ii_ * n_ii_;
        return {s / block, s % block};
    }

    const Mat& op(int s) const { return ops_[s]; }
    const GeneratorSet& gen_i() const { return gen_i_; }
    const GeneratorSet& gen_ii() const { return gen_ii_; }

  private:
    int n_i_, n_ii_;
    GeneratorSet gen_i_, gen_ii_;
    std::vector<Mat> ops_;
};

// Real expansion coefficients q_s = Tr{Q_s rho} of a density operator.
struct CoefficientVector {
    std::shared_ptr<const BipartiteBasis> basis;
    RealVec q;

    int size() const { return static_cast<int>(q.size()); }
};

CoefficientVector expand(const DensityMatrix& rho,
                         std::shared_ptr<const BipartiteBasis> basis);

DensityMatrix reconstruct(const CoefficientVector& coeffs);
Mat reconstruct_raw(const CoefficientVector& coeffs);

// The slice q_{i0} (subsystem I) or q_{0j} (subsystem II).
RealVec reduced_coefficients(const CoefficientVector& coeffs, Subsystem which);

// P = n_II * sum_i q_{i0}^2 (resp. n_I * sum_j q_{0j}^2).
double purity_from_coefficients(const CoefficientVector& coeffs, Subsystem which);

// Debug dump: one line per coefficient, "flat,i,j,value", ordering documented
// in the header comment lines.
void write_coefficients_csv(const CoefficientVector& coeffs, std::ostream& os);

}  // namespace entdyn
