// Command-line front end: JC benchmark runs, purity-witness scans over random
// Hamiltonians, and exact-vs-mean-field comparisons on user-supplied models.
//
// Exit codes: 0 success, 1 usage or I/O failure, 2 scientific-validity
// failure (truncation leakage, norm drift, witness counterexample).

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "entdyn/coefficient_dynamics.hpp"
#include "entdyn/io.hpp"
#include "entdyn/jaynes_cummings.hpp"
#include "entdyn/mean_field.hpp"

namespace {

using namespace entdyn;
using nlohmann::json;

struct ValidityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / name);
    if (!f) {
        throw std::runtime_error("cannot open output file: " + (dir / name).string());
    }
    return f;
}

struct RunSummary {
    double max_fidelity_purity_gap = 0.0;
    std::optional<double> fidelity_purity_rel_gap;  // over 1-P in [1e-4, 1e-2]
    double max_norm_drift = 0.0;
};

RunSummary summarize(const std::vector<TrajectoryPoint>& exact_pts) {
    RunSummary s;
    for (const auto& p : exact_pts) {
        const double gap = std::abs(p.fidelity_sq - std::sqrt(p.p));
        s.max_fidelity_purity_gap = std::max(s.max_fidelity_purity_gap, gap);
        const double ent = 1.0 - p.p;
        if (ent >= 1e-4 && ent <= 1e-2) {
            s.fidelity_purity_rel_gap = std::max(s.fidelity_purity_rel_gap.value_or(0.0),
                                                 gap / ent);
        }
        s.max_norm_drift = std::max({s.max_norm_drift, std::abs(p.norm_i - 1.0),
                                     std::abs(p.norm_ii - 1.0)});
    }
    return s;
}

// Shared by jc and compare: exact + mean-field runs, the two trajectory
// files, and the gap summary.
RunSummary run_and_write(const HamiltonianSplit& split, const ProductState& init,
                         double t_max, double dt, Gauge gauge,
                         const std::filesystem::path& outdir,
                         std::vector<TrajectoryPoint>* exact_out) {
    const auto exact = evolve_exact(split, init, t_max, dt);
    const auto mf = evolve_mean_field(split, init, t_max, dt, gauge);

    std::shared_ptr<const BipartiteBasis> basis;
    if (split.dim() <= 64) {
        basis = BipartiteBasis::get(split.n_i(), split.n_ii());
    }
    const auto exact_pts = trajectory_diagnostics(split, exact, mf, dt, basis);
    const auto mf_pts = mean_field_diagnostics(split, exact, mf, dt, basis);

    auto f1 = open_output(outdir, "trajectory.csv");
    write_trajectory_csv(f1, exact_pts);
    auto f2 = open_output(outdir, "mean_field.csv");
    write_trajectory_csv(f2, mf_pts);

    if (exact_out) {
        *exact_out = exact_pts;
    }
    // truncation guard: the top three levels of subsystem II must stay empty
    const int n_i = split.n_i(), n_ii = split.n_ii();
    if (n_ii > 3) {
        for (size_t k = 0; k < exact.size(); ++k) {
            double top = 0.0;
            for (int a = 0; a < n_i; ++a) {
                for (int c = n_ii - 3; c < n_ii; ++c) {
                    top += std::norm(exact[k].amps(a * n_ii + c));
                }
            }
            if (top > 1e-8) {
                std::ostringstream os;
                os << "truncation leakage: top-3 level population " << top << " at t = "
                   << static_cast<double>(k) * dt;
                throw ValidityError(os.str());
            }
        }
    }
    return summarize(exact_pts);
}

Gauge parse_gauge(const std::string& name) {
    if (name == "raw") {
        return Gauge::Raw;
    }
    if (name == "fixed") {
        return Gauge::PhaseFixed;
    }
    throw CLI::ValidationError("--gauge must be 'raw' or 'fixed'");
}

int cmd_jc(const JCPreset& preset, Gauge gauge, const std::filesystem::path& outdir) {
    if (preset.params.n_cut < required_cutoff(preset.params.coherent_alpha)) {
        std::cerr << "truncation leakage: n_cut = " << preset.params.n_cut
                  << " is below the required cutoff "
                  << required_cutoff(preset.params.coherent_alpha) << "\n";
        return 2;
    }
    preset.params.validate();

    const auto start = std::chrono::steady_clock::now();
    const HamiltonianSplit split = build_jc(preset.params);
    const CoherentState field(preset.params.coherent_alpha, preset.params.n_cut);
    const ProductState init{basis_state(2, 0), field.to_state(), 0.0};

    std::vector<TrajectoryPoint> exact_pts;
    const RunSummary s =
        run_and_write(split, init, preset.t_max, preset.dt, gauge, outdir, &exact_pts);

    // deviation from the quadratic purity law over gamma*t in [0.05, 0.2]
    std::optional<double> law_err;
    const double g = preset.params.gamma;
    for (const auto& p : exact_pts) {
        const double gt = g * p.t;
        if (gt >= 0.05 - 1e-12 && gt <= 0.2 + 1e-12) {
            const double predicted = 1.0 - short_time_law(g, p.t);
            law_err = std::max(law_err.value_or(0.0),
                               std::abs((1.0 - p.p) - predicted) / predicted);
        }
    }

    const double runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json summary;
    summary["max_fidelity_purity_gap"] = s.max_fidelity_purity_gap;
    summary["purity_law_max_rel_err"] = law_err ? json(*law_err) : json(nullptr);
    summary["runtime_s"] = runtime;
    auto f = open_output(outdir, "summary.json");
    f << summary.dump(2) << "\n";
    return 0;
}

int cmd_theorem_b(int n_i, int n_ii, int trials, std::uint64_t seed,
                  const std::filesystem::path& outdir) {
    auto basis = BipartiteBasis::get(n_i, n_ii);
    const PurityProjector proj = purity_projector(basis);

    struct Row {
        double w_norm = 0.0;
        double witness = 0.0;
    };
    std::vector<Row> rows(trials);

    // worker pool; rows are ordered by trial index, not completion time
    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= trials) {
                return;
            }
            std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (i + 1)));
            const Mat h = random_hermitian(n_i * n_ii, rng);
            const HamiltonianSplit split = split_local_interaction(h, n_i, n_ii);
            const QuasiHamiltonian hq = build_quasi_hamiltonian(h, basis);
            rows[i] = Row{split.w.norm(), theorem_b_witness(hq, proj)};
        }
    };
    const unsigned hw = std::thread::hardware_concurrency();
    const unsigned n_workers =
        std::min<unsigned>(hw ? hw : 1u, static_cast<unsigned>(std::max(trials, 1)));
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n_workers; ++k) {
        pool.emplace_back(work);
    }
    for (auto& th : pool) {
        th.join();
    }

    auto f = open_output(outdir, "witness.csv");
    f << "trial,n_I,n_II,W_norm,witness\n";
    bool falsified = false;
    for (int i = 0; i < trials; ++i) {
        f << i << ',' << n_i << ',' << n_ii << ',' << fmt_g17(rows[i].w_norm) << ','
          << fmt_g17(rows[i].witness) << '\n';
        if (rows[i].w_norm > 1e-6 && rows[i].witness <= 1e-10) {
            falsified = true;
        }
    }
    if (falsified) {
        std::cerr << "witness counterexample: interacting Hamiltonian with vanishing "
                     "purity commutator\n";
        return 2;
    }
    return 0;
}

int cmd_compare(const std::string& l1_path, const std::string& l2_path,
                const std::string& w_path, const std::string& init_i_path,
                const std::string& init_ii_path, double t_max, double dt, Gauge gauge,
                const std::filesystem::path& outdir) {
    const auto start = std::chrono::steady_clock::now();
    const Mat l1 = read_matrix_file(l1_path);
    const Mat l2 = read_matrix_file(l2_path);
    const Mat w = read_matrix_file(w_path);
    const HamiltonianSplit split(l1, l2, w);  // rejects non-Hermitian input

    StateVector init_i = init_i_path.empty() ? basis_state(split.n_i(), 0)
                                             : StateVector(read_vector_file(init_i_path));
    StateVector init_ii = init_ii_path.empty() ? basis_state(split.n_ii(), 0)
                                               : StateVector(read_vector_file(init_ii_path));
    const ProductState init{std::move(init_i), std::move(init_ii), 0.0};

    const RunSummary s = run_and_write(split, init, t_max, dt, gauge, outdir, nullptr);

    const double runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json summary;
    summary["max_fidelity_purity_gap"] = s.max_fidelity_purity_gap;
    summary["fidelity_purity_rel_gap"] =
        s.fidelity_purity_rel_gap ? json(*s.fidelity_purity_rel_gap) : json(nullptr);
    summary["max_norm_drift"] = s.max_norm_drift;
    summary["runtime_s"] = runtime;
    auto f = open_output(outdir, "summary.json");
    f << summary.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "entdyn: bipartite entanglement dynamics, exact and in the factorization "
        "approximation (hbar = 1, angular-frequency units)"};
    app.require_subcommand(1);

    std::filesystem::path outdir = ".";
    std::uint64_t seed = 1;
    double t_max = 1.0, dt = 1e-3;
    std::string gauge_name = "fixed";

    auto add_common = [&](CLI::App* sub, bool with_run_flags) {
        sub->add_option("--output", outdir, "output directory")->capture_default_str();
        sub->add_option("--seed", seed, "RNG seed")->capture_default_str();
        if (with_run_flags) {
            sub->add_option("--t-max", t_max, "run length");
            sub->add_option("--dt", dt, "integration / sampling step");
            sub->add_option("--gauge", gauge_name, "raw | fixed")->capture_default_str();
        }
    };

    auto* jc = app.add_subcommand("jc", "spin-boson benchmark run");
    std::string preset_path;
    double omega = 1.0, gamma = 0.05, alpha = 6.0;
    int n_cut = 0;
    auto* opt_preset = jc->add_option("--preset", preset_path,
                                      "preset file with 'key = value' lines");
    opt_preset->excludes(jc->add_option("--omega", omega, "field angular frequency"));
    opt_preset->excludes(jc->add_option("--gamma", gamma, "coupling"));
    opt_preset->excludes(jc->add_option("--alpha", alpha, "coherent-state parameter"));
    opt_preset->excludes(jc->add_option("--n-cut", n_cut, "Fock truncation (0 = auto)"));
    add_common(jc, true);

    auto* tb = app.add_subcommand("theorem-b",
                                  "purity-witness scan over random Hamiltonians");
    int n_i = 2, n_ii = 2, trials = 100;
    tb->add_option("--n-i", n_i, "subsystem I dimension")
        ->capture_default_str()
        ->check(CLI::Range(2, 18));
    tb->add_option("--n-ii", n_ii, "subsystem II dimension")
        ->capture_default_str()
        ->check(CLI::Range(2, 18));
    tb->add_option("--trials", trials, "number of random Hamiltonians")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    add_common(tb, false);

    auto* cp = app.add_subcommand("compare", "exact vs mean-field on a user model");
    std::string l1_path, l2_path, w_path, init_i_path, init_ii_path;
    cp->add_option("--l1", l1_path, "L_I matrix file")->required();
    cp->add_option("--l2", l2_path, "L_II matrix file")->required();
    cp->add_option("--w", w_path, "W matrix file")->required();
    cp->add_option("--init-i", init_i_path, "initial subsystem-I state file");
    cp->add_option("--init-ii", init_ii_path, "initial subsystem-II state file");
    add_common(cp, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (jc->parsed()) {
            JCPreset preset;
            if (!preset_path.empty()) {
                preset = load_preset(preset_path);
            } else {
                preset.params.omega = omega;
                preset.params.b_field_energy = omega;  // resonance by default
                preset.params.gamma = gamma;
                preset.params.coherent_alpha = alpha;
                preset.params.n_cut = n_cut ? n_cut : required_cutoff(alpha);
                preset.t_max = 4.0;
                preset.dt = 1e-3;
            }
            if (jc->count("--t-max")) {
                preset.t_max = t_max;
            }
            if (jc->count("--dt")) {
                preset.dt = dt;
            }
            return cmd_jc(preset, parse_gauge(gauge_name), outdir);
        }
        if (tb->parsed()) {
            if (n_i * n_ii > 36) {
                throw std::invalid_argument("theorem-b requires n_i * n_ii <= 36");
            }
            return cmd_theorem_b(n_i, n_ii, trials, seed, outdir);
        }
        return cmd_compare(l1_path, l2_path, w_path, init_i_path, init_ii_path, t_max, dt,
                           parse_gauge(gauge_name), outdir);
    } catch (const ValidityError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const NormDriftError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
