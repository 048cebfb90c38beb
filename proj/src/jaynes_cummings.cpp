#include "entdyn/jaynes_cummings.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace entdyn {

int required_cutoff(Cplx alpha) {
    const double a = std::abs(alpha);
    return static_cast<int>(std::ceil(a * a + 6.0 * a + 10.0));
}

void JCParams::validate() const {
    if (omega <= 0.0) {
        throw std::invalid_argument("JCParams: omega must be positive");
    }
    if (gamma < 0.0) {
        throw std::invalid_argument("JCParams: gamma must be non-negative");
    }
    if (n_cut < required_cutoff(coherent_alpha)) {
        std::ostringstream os;
        os << "JCParams: truncation too small, n_cut = " << n_cut << " < "
           << required_cutoff(coherent_alpha) << " required for |alpha| = "
           << std::abs(coherent_alpha);
        throw std::invalid_argument(os.str());
    }
}

bool JCParams::resonant(double tol) const {
    return std::abs(b_field_energy - omega) <= tol * std::max(1.0, std::abs(omega));
}

CoherentState::CoherentState(Cplx alpha_in, int n_cut) : alpha(alpha_in) {
    if (n_cut < 1) {
        throw std::invalid_argument("CoherentState: n_cut must be >= 1");
    }
    amps.resize(n_cut);
    amps(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < n_cut; ++n) {
        amps(n) = amps(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    }
    const double missing = 1.0 - amps.squaredNorm();
    if (missing > 1e-10) {
        std::ostringstream os;
        os << "CoherentState: truncation leakage " << missing << " exceeds 1e-10 at n_cut = "
           << n_cut;
        throw std::invalid_argument(os.str());
    }
}

Cplx CoherentState::mean_annihilation() const {
    Cplx acc = 0.0;
    for (int n = 0; n + 1 < amps.size(); ++n) {
        acc += std::conj(amps(n)) * amps(n + 1) * std::sqrt(static_cast<double>(n + 1));
    }
    return acc;
}

HamiltonianSplit build_jc(const JCParams& params) {
    params.validate();
    const int nf = params.n_cut;
    Mat l_i = 0.5 * params.b_field_energy * pauli_z();
    Mat l_ii = params.omega * (creation(nf) * annihilation(nf) + 0.5 * identity(nf));
    Mat w = params.gamma * (tensor_product(sigma_minus(), creation(nf)) +
                            tensor_product(sigma_plus(), annihilation(nf)));
    return HamiltonianSplit(std::move(l_i), std::move(l_ii), std::move(w));
}

std::vector<DressedPair> dressed_states(const JCParams& params) {
    params.validate();
    if (!params.resonant()) {
        std::ostringstream os;
        os << "dressed_states: closed form requires resonance, B_E = " << params.b_field_energy
           << " vs omega = " << params.omega;
        throw std::domain_error(os.str());
    }
    const int nf = params.n_cut;
    std::vector<DressedPair> out;
    out.reserve(nf - 1);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int n = 1; n < nf; ++n) {
        // excitation sector n: (upper spin, n-1 photons) and (lower spin, n photons)
        Vec plus = Vec::Zero(2 * nf);
        Vec minus = Vec::Zero(2 * nf);
        const int upper = n - 1;     // flat index of |0>_s (x) |n-1>_f
        const int lower = nf + n;    // flat index of |1>_s (x) |n>_f
        plus(upper) = inv_sqrt2;
        plus(lower) = inv_sqrt2;
        minus(upper) = inv_sqrt2;
        minus(lower) = -inv_sqrt2;
        const double rabi = params.gamma * std::sqrt(static_cast<double>(n));
        out.push_back(DressedPair{n, StateVector(std::move(plus)), StateVector(std::move(minus)),
                                  params.omega * n + rabi, params.omega * n - rabi});
    }
    return out;
}

BlochVector bloch_series(const JCParams& params, double t) {
    params.validate();
    const CoherentState coh(params.coherent_alpha, params.n_cut);
    const Vec& a = coh.amps;
    const int nf = static_cast<int>(a.size());
    const double g = params.gamma;

    BlochVector b;
    for (int n = 0; n < nf; ++n) {
        b.sz += std::norm(a(n)) * std::cos(2.0 * g * std::sqrt(n + 1.0) * t);
    }
    const Cplx rot = std::exp(Cplx(0.0, -params.omega * t));
    for (int n = 0; n + 1 < nf; ++n) {
        const Cplx cross = std::conj(a(n)) * a(n + 1) * rot;
        const double bracket =
            std::sin(g * (std::sqrt(n + 1.0) + std::sqrt(n + 2.0)) * t) +
            std::sin(g * (std::sqrt(n + 1.0) - std::sqrt(n + 2.0)) * t);
        b.sx -= cross.imag() * bracket;
        b.sy -= cross.real() * bracket;
    }
    return b;
}

double purity_from_bloch(double sx, double sy, double sz) {
    const double s2 = sx * sx + sy * sy + sz * sz;
    if (std::sqrt(s2) > 1.0 + 1e-9) {
        std::ostringstream os;
        os << "purity_from_bloch: Bloch norm " << std::sqrt(s2) << " exceeds 1";
        throw std::invalid_argument(os.str());
    }
    return std::min(0.5 * (1.0 + s2), 1.0);
}

double purity_from_bloch(const BlochVector& b) { return purity_from_bloch(b.sx, b.sy, b.sz); }

double short_time_law(double gamma, double t) { return 1.0 - gamma * gamma * t * t; }

Mat semiclassical_drive(const JCParams& params, double t) {
    params.validate();
    const CoherentState coh(params.coherent_alpha, params.n_cut);
    const Cplx a_t = coh.mean_annihilation() * std::exp(Cplx(0.0, -params.omega * t));
    return 0.5 * params.b_field_energy * pauli_z() +
           params.gamma * (std::conj(a_t) * sigma_minus() + a_t * sigma_plus());
}

JCPreset parse_preset(std::istream& is) {
    std::map<std::string, double> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::string key, eq;
        double value = 0.0;
        std::istringstream ls(line);
        if (!(ls >> key)) {
            continue;
        }
        if (!(ls >> eq) || eq != "=" || !(ls >> value)) {
            std::ostringstream os;
            os << "preset line " << lineno << ": expected 'key = value', got '" << line << "'";
            throw std::invalid_argument(os.str());
        }
        kv[key] = value;
    }
    JCPreset preset;
    bool have_b = false;
    for (const auto& [key, value] : kv) {
        if (key == "omega") {
            preset.params.omega = value;
        } else if (key == "gamma") {
            preset.params.gamma = value;
        } else if (key == "alpha") {
            preset.params.coherent_alpha = value;
        } else if (key == "n_cut") {
            preset.params.n_cut = static_cast<int>(value);
        } else if (key == "b_field_energy") {
            preset.params.b_field_energy = value;
            have_b = true;
        } else if (key == "t_max") {
            preset.t_max = value;
        } else if (key == "dt") {
            preset.dt = value;
        } else {
            throw std::invalid_argument("preset: unknown key '" + key + "'");
        }
    }
    if (!have_b) {
        preset.params.b_field_energy = preset.params.omega;  // resonance default
    }
    if (preset.params.n_cut == 0) {
        preset.params.n_cut = required_cutoff(preset.params.coherent_alpha);
    }
    return preset;
}

JCPreset load_preset(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw std::runtime_error("cannot open preset file: " + path);
    }
    return parse_preset(f);
}

}  // namespace entdyn
