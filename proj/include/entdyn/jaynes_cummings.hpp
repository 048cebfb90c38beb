#pragma once

// Spin-1/2 coupled to a single truncated bosonic mode under the rotating
// wave approximation:
//
//   H = (B_E/2) sigma_z + omega (a^dag a + 1/2) + gamma (a^dag sigma^- + a sigma^+)
//
// in spin-major layout (subsystem I = spin, II = field), hbar = 1. With the
// library's spin convention (index 0 <-> sigma_z = +1), index 0 is the upper
// level at positive field energy B_E: sigma^- drops it while a^dag creates a
// photon, so the interaction conserves the total excitation a^dag a + |0><0|.
//
// At resonance (B_E = omega) the excitation sector n >= 1 is spanned by
// (upper, n-1 photons) and (lower, n photons); the symmetric/antisymmetric
// combinations are eigenstates at energies omega*n +- gamma*sqrt(n).
//
// Benchmark runs start from (coherent field) (x) (spin index 0), i.e. Bloch
// vector (0, 0, +1).

#include <iosfwd>
#include <string>

#include "entdyn/mean_field.hpp"
#include "entdyn/operator_core.hpp"

namespace entdyn {

// Smallest safe Fock truncation for a coherent field: the Poisson photon
// distribution keeps 98% of its weight within 3 standard deviations of
// |alpha|^2; the doubled margin plus a constant covers spreading in time.
int required_cutoff(Cplx alpha);

struct JCParams {
    double omega = 1.0;           // field angular frequency
    double gamma = 0.0;           // coupling (angular frequency)
    double b_field_energy = 1.0;  // spin splitting B*g*mu; omega at resonance
    int n_cut = 0;                // Fock-space truncation dimension
    Cplx coherent_alpha = 0.0;

    void validate() const;
    bool resonant(double tol = 1e-12) const;
};

// A_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!), truncated at n_cut with a
// leakage bound of 1e-10 on the missing weight.
struct CoherentState {
    Cplx alpha;
    Vec amps;

    CoherentState(Cplx alpha, int n_cut);
    StateVector to_state() const { return StateVector(amps); }
    Cplx mean_annihilation() const;  // <a> over the truncated amplitudes
};

struct DressedPair {
    int n = 0;  // excitation number >= 1
    StateVector plus;
    StateVector minus;
    double e_plus = 0.0;
    double e_minus = 0.0;
};

struct BlochVector {
    double sx = 0.0, sy = 0.0, sz = 0.0;
};

HamiltonianSplit build_jc(const JCParams& params);

// Closed-form eigenpairs; only valid (and only constructed) at resonance.
std::vector<DressedPair> dressed_states(const JCParams& params);

// Exact Bloch components at resonance for the benchmark initial state
// (coherent alpha) (x) (spin index 0):
//   sz =  sum_n |A_n|^2 cos(2 gamma sqrt(n+1) t)
//   sx = -sum_n Im[conj(A_n) A_{n+1} e^{-i omega t}] *
//            [sin(gamma (sqrt(n+1)+sqrt(n+2)) t) + sin(gamma (sqrt(n+1)-sqrt(n+2)) t)]
//   sy = same with Re in place of Im.
BlochVector bloch_series(const JCParams& params, double t);

// P = (1 + sx^2 + sy^2 + sz^2) / 2; rejects Bloch vectors longer than 1.
double purity_from_bloch(double sx, double sy, double sz);
double purity_from_bloch(const BlochVector& b);

// The quadratic short-time prediction 1 - gamma^2 t^2, for comparison
// against simulated purity.
double short_time_law(double gamma, double t);

// Effective 2x2 spin Hamiltonian when the field follows its free coherent
// trajectory <a>(t) = <a>(0) e^{-i omega t}:
//   (B_E/2) sigma_z + gamma (conj(<a>(t)) sigma^- + <a>(t) sigma^+).
Mat semiclassical_drive(const JCParams& params, double t);

// Plain-text "key = value" benchmark presets; keys omega, gamma, alpha,
// n_cut, b_field_energy, t_max, dt ('#' comments allowed).
struct JCPreset {
    JCParams params;
    double t_max = 1.0;
    double dt = 1e-3;
};

JCPreset parse_preset(std::istream& is);
JCPreset load_preset(const std::string& path);

}  // namespace entdyn
