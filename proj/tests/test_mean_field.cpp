#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "entdyn/mean_field.hpp"

using namespace entdyn;

namespace {

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

StateVector plus_state() {
    Vec v(2);
    v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return StateVector(std::move(v));
}

HamiltonianSplit random_small_model(std::mt19937_64& rng, double w_scale = 0.3) {
    return HamiltonianSplit(random_hermitian(2, rng), random_hermitian(2, rng),
                            (w_scale * random_hermitian(4, rng)).eval());
}

}  // namespace

TEST_CASE("hamiltonian split") {
    std::mt19937_64 rng(3);

    SUBCASE("construction demands Hermitian parts") {
        Mat bad = Mat::Zero(2, 2);
        bad(0, 1) = 1.0;
        CHECK_THROWS_AS(HamiltonianSplit(bad, identity(2), Mat::Zero(4, 4)),
                        std::invalid_argument);
        CHECK_THROWS_AS(HamiltonianSplit(identity(2), identity(2), Mat::Zero(6, 6)),
                        std::invalid_argument);
    }

    SUBCASE("split_local_interaction inverts full()") {
        for (auto [ni, nii] : {std::pair{2, 2}, {2, 3}, {3, 3}}) {
            const Mat h = random_hermitian(ni * nii, rng);
            const HamiltonianSplit s = split_local_interaction(h, ni, nii);
            CHECK(max_abs(s.full() - h) <= 1e-12);
            // W has no purely local component left
            CHECK(max_abs(partial_trace_raw(s.w, ni, nii, Subsystem::I)) <= 1e-12);
            CHECK(max_abs(partial_trace_raw(s.w, ni, nii, Subsystem::II)) <= 1e-12);
        }
        const Mat local = tensor_product(random_hermitian(2, rng), identity(3)) +
                          tensor_product(identity(2), random_hermitian(3, rng));
        CHECK(split_local_interaction(local, 2, 3).w.norm() <= 1e-12);
    }
}

TEST_CASE("effective hamiltonian") {
    std::mt19937_64 rng(5);

    SUBCASE("W = 0 returns the local part") {
        const HamiltonianSplit s(random_hermitian(2, rng), random_hermitian(3, rng),
                                 Mat::Zero(6, 6));
        CHECK(max_abs(effective_hamiltonian(s, random_state(3, rng), Subsystem::I) - s.l_i) ==
              0.0);
    }

    SUBCASE("sx (x) sx against |+> gives sx") {
        const HamiltonianSplit s(Mat::Zero(2, 2), Mat::Zero(2, 2),
                                 tensor_product(pauli_x(), pauli_x()));
        const Mat eff = effective_hamiltonian(s, plus_state(), Subsystem::I);
        CHECK(max_abs(eff - pauli_x()) <= 1e-12);  // <+|sx|+> = 1
    }

    SUBCASE("always Hermitian") {
        for (int trial = 0; trial < 10; ++trial) {
            const HamiltonianSplit s = random_small_model(rng);
            const Mat eff = effective_hamiltonian(s, random_state(2, rng), Subsystem::II);
            CHECK(max_abs(eff - eff.adjoint()) <= 1e-12);
        }
    }
}

TEST_CASE("mean-field evolution") {
    std::mt19937_64 rng(7);

    SUBCASE("decoupled subsystems follow the bare propagator") {
        const Mat l_i = random_hermitian(2, rng);
        const HamiltonianSplit s(l_i, random_hermitian(2, rng), Mat::Zero(4, 4));
        const ProductState init{random_state(2, rng), random_state(2, rng), 0.0};
        const auto traj = evolve_mean_field(s, init, 1.0, 0.005, Gauge::PhaseFixed);
        const Vec expected = propagator(l_i, 1.0) * init.phi_i.amps;
        CHECK((traj.back().phi_i.amps - expected).cwiseAbs().maxCoeff() <= 1e-8);
    }

    SUBCASE("both gauges give identical populations") {
        const HamiltonianSplit s = random_small_model(rng);
        const ProductState init{random_state(2, rng), random_state(2, rng), 0.0};
        const double t_max = 2.0, dt = 0.002;
        const auto raw = evolve_mean_field(s, init, t_max, dt, Gauge::Raw);
        const auto fixed = evolve_mean_field(s, init, t_max, dt, Gauge::PhaseFixed);
        REQUIRE(raw.size() == fixed.size());
        for (size_t k = 0; k < raw.size(); ++k) {
            CHECK((raw[k].phi_i.amps.cwiseAbs2() - fixed[k].phi_i.amps.cwiseAbs2())
                      .cwiseAbs()
                      .maxCoeff() <= 1e-8);
            CHECK((raw[k].phi_ii.amps.cwiseAbs2() - fixed[k].phi_ii.amps.cwiseAbs2())
                      .cwiseAbs()
                      .maxCoeff() <= 1e-8);
        }
        // and identical fidelity against one exact reference
        const auto exact = evolve_exact(s, init, t_max, dt);
        for (size_t k = 0; k < raw.size(); k += 100) {
            CHECK(fidelity_sq(exact[k], raw[k]) ==
                  doctest::Approx(fidelity_sq(exact[k], fixed[k])).epsilon(1e-8));
        }
    }

    SUBCASE("step-size bound is enforced") {
        const HamiltonianSplit s((10.0 * pauli_z()).eval(), Mat::Zero(2, 2), Mat::Zero(4, 4));
        const ProductState init{basis_state(2, 0), basis_state(2, 0), 0.0};
        CHECK_THROWS_AS(evolve_mean_field(s, init, 1.0, 0.02, Gauge::PhaseFixed),
                        std::invalid_argument);
    }

    SUBCASE("norm drift beyond 1e-6 aborts with a diagnostic") {
        // an eigenstate at the spectral edge maximizes the per-step norm loss
        const HamiltonianSplit s((10.0 * pauli_z()).eval(), Mat::Zero(2, 2), Mat::Zero(4, 4));
        const ProductState init{basis_state(2, 0), basis_state(2, 0), 0.0};
        CHECK_THROWS_WITH_AS(evolve_mean_field(s, init, 3.0, 0.00999, Gauge::PhaseFixed),
                             doctest::Contains("norm drift"), NormDriftError);
    }

    SUBCASE("subsystem norms hold to 1e-8 over t*||H|| up to 50") {
        const HamiltonianSplit s = random_small_model(rng);
        const double t_max = 45.0 / std::max({operator_norm(s.l_i), operator_norm(s.l_ii),
                                              operator_norm(s.w)});
        const ProductState init{random_state(2, rng), random_state(2, rng), 0.0};
        const auto traj = evolve_mean_field(s, init, t_max, 0.01, Gauge::PhaseFixed);
        for (const auto& st : traj) {
            CHECK(std::abs(st.phi_i.norm() - 1.0) <= 1e-8);
            CHECK(std::abs(st.phi_ii.norm() - 1.0) <= 1e-8);
        }
    }

    SUBCASE("embedded product purity stays 1") {
        const HamiltonianSplit s = random_small_model(rng);
        const ProductState init{random_state(2, rng), random_state(2, rng), 0.0};
        const auto traj = evolve_mean_field(s, init, 2.0, 0.005, Gauge::PhaseFixed);
        for (size_t k = 0; k < traj.size(); k += 50) {
            Vec prod = tensor_product(traj[k].phi_i.amps, traj[k].phi_ii.amps);
            prod /= prod.norm();
            const DensityMatrix red =
                partial_trace(pure_density(StateVector::unchecked(prod)), 2, 2, Subsystem::I);
            CHECK(std::abs(purity(red) - 1.0) <= 1e-8);
        }
    }
}

TEST_CASE("exact evolution") {
    std::mt19937_64 rng(17);

    SUBCASE("no interaction keeps a product state pure") {
        const HamiltonianSplit s(random_hermitian(2, rng), random_hermitian(3, rng),
                                 Mat::Zero(6, 6));
        const ProductState init{random_state(2, rng), random_state(3, rng), 0.0};
        const auto traj = evolve_exact(s, init, 2.0, 0.05);
        for (const auto& psi : traj) {
            const DensityMatrix red = partial_trace(pure_density(psi), 2, 3, Subsystem::I);
            CHECK(std::abs(purity(red) - 1.0) <= 1e-10);
        }
    }

    SUBCASE("Bell-generating closed form") {
        // exp(-i (pi/4) sx(x)sx) |00> at t = 1 is maximally entangled
        const HamiltonianSplit s(Mat::Zero(2, 2), Mat::Zero(2, 2),
                                 (M_PI / 4.0 * tensor_product(pauli_x(), pauli_x())).eval());
        const ProductState init{basis_state(2, 0), basis_state(2, 0), 0.0};
        const auto traj = evolve_exact(s, init, 1.0, 0.01);
        const DensityMatrix red =
            partial_trace(pure_density(traj.back()), 2, 2, Subsystem::I);
        CHECK(purity(red) == doctest::Approx(0.5).epsilon(1e-10));
    }

    SUBCASE("energy is conserved") {
        const HamiltonianSplit s = random_small_model(rng);
        const Mat h = s.full();
        const ProductState init{random_state(2, rng), random_state(2, rng), 0.0};
        const auto traj = evolve_exact(s, init, 5.0, 0.1);
        const double e0 = expectation(h, traj.front()).real();
        for (const auto& psi : traj) {
            CHECK(std::abs(expectation(h, psi).real() - e0) <= 1e-10);
            CHECK(std::abs(psi.norm() - 1.0) <= 1e-10);
        }
    }
}

TEST_CASE("correlation tensor and beta") {
    std::mt19937_64 rng(19);
    auto basis22 = BipartiteBasis::get(2, 2);

    SUBCASE("product state gives beta = 0") {
        const StateVector psi = StateVector(
            tensor_product(random_state(2, rng).amps, random_state(2, rng).amps));
        const auto [tensor, beta] = correlation_beta(psi, basis22);
        CHECK(beta <= 1e-10);
        CHECK(tensor.m.cwiseAbs().maxCoeff() <= 1e-10);
    }

    SUBCASE("Bell state saturates beta = 3/4 = 1 - P^2") {
        Vec bell = Vec::Zero(4);
        bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
        const auto [tensor, beta] = correlation_beta(StateVector(bell), basis22);
        CHECK(beta == doctest::Approx(0.75).epsilon(1e-12));
        const double p = purity(partial_trace(pure_density(StateVector(bell)), 2, 2,
                                              Subsystem::I));
        CHECK(beta == doctest::Approx(1.0 - p * p).epsilon(1e-12));
    }

    SUBCASE("zero rows and columns at index 0, bound holds") {
        for (auto [ni, nii] : {std::pair{2, 2}, {2, 3}}) {
            auto basis = BipartiteBasis::get(ni, nii);
            for (int trial = 0; trial < 100; ++trial) {
                const StateVector psi = random_state(ni * nii, rng);
                const auto [tensor, beta] = correlation_beta(psi, basis);
                CHECK(tensor.m.row(0).cwiseAbs().maxCoeff() <= 1e-12);
                CHECK(tensor.m.col(0).cwiseAbs().maxCoeff() <= 1e-12);
                const double p = purity(
                    partial_trace(pure_density(psi), ni, nii, Subsystem::I));
                CHECK(beta <= 1.0 - p * p + 1e-10);
            }
        }
    }
}

TEST_CASE("fidelity") {
    std::mt19937_64 rng(23);
    const StateVector a = random_state(2, rng);
    const StateVector b = random_state(3, rng);
    const ProductState phi{a, b, 0.0};
    CHECK(fidelity_sq(StateVector(tensor_product(a.amps, b.amps)), phi) ==
          doctest::Approx(1.0).epsilon(1e-12));

    Vec orth = Vec::Zero(2);
    orth(0) = -std::conj(a.amps(1));
    orth(1) = std::conj(a.amps(0));
    CHECK(fidelity_sq(StateVector(tensor_product((Vec(orth)).eval(), b.amps)), phi) <= 1e-12);
}

TEST_CASE("first-order deviation") {
    SUBCASE("no interaction gives theta = 0") {
        std::mt19937_64 rng(29);
        const HamiltonianSplit s(random_hermitian(2, rng), random_hermitian(2, rng),
                                 Mat::Zero(4, 4));
        const auto branches = evolve_mean_field_branches(s, identity(2), identity(2), 1.0,
                                                         0.01, Gauge::PhaseFixed);
        const Eigen::MatrixXcd theta = perturbative_deviation(s, branches, 0, 1.0);
        CHECK(theta.cwiseAbs().maxCoeff() <= 1e-12);
    }

    SUBCASE("weak two-qubit coupling matches the infidelity") {
        // H = eps sx(x)sx from |00>: the effective fields vanish along the
        // reference branch, theta_11 = -i eps t, 1 - F^2 = sin^2(eps t)
        const double eps = 0.01;
        const HamiltonianSplit s(Mat::Zero(2, 2), Mat::Zero(2, 2),
                                 (eps * tensor_product(pauli_x(), pauli_x())).eval());
        const double t_max = 2.0, dt = 0.005;
        const auto branches =
            evolve_mean_field_branches(s, identity(2), identity(2), t_max, dt,
                                       Gauge::PhaseFixed);
        const Eigen::MatrixXcd theta = perturbative_deviation(s, branches, 0, t_max);

        CHECK(std::abs(theta(0, 0)) <= 1e-14);
        const double off_local = std::max(std::abs(theta(1, 0)), std::abs(theta(0, 1)));
        CHECK(off_local <= 1e-3 * theta.cwiseAbs().maxCoeff());
        CHECK(std::abs(theta(1, 1) - Cplx(0.0, -eps * t_max)) <= 1e-8);

        const ProductState init{basis_state(2, 0), basis_state(2, 0), 0.0};
        const auto exact = evolve_exact(s, init, t_max, dt);
        const auto mf = evolve_mean_field(s, init, t_max, dt, Gauge::PhaseFixed);
        const double infidelity = 1.0 - fidelity_sq(exact.back(), mf.back());
        const double theta_sq = theta.cwiseAbs2().sum();
        CHECK(std::abs(theta_sq - infidelity) <= 0.1 * infidelity);
    }

    SUBCASE("non-orthonormal seeds are rejected") {
        std::mt19937_64 rng(31);
        const HamiltonianSplit s = random_small_model(rng);
        Mat bad = identity(2);
        bad(0, 1) = 0.3;
        CHECK_THROWS_AS(
            evolve_mean_field_branches(s, bad, identity(2), 0.5, 0.01, Gauge::PhaseFixed),
            std::invalid_argument);
    }
}

TEST_CASE("trajectory diagnostics") {
    std::mt19937_64 rng(37);
    const HamiltonianSplit s = random_small_model(rng);
    const ProductState init{random_state(2, rng), random_state(2, rng), 0.0};
    const double t_max = 1.0, dt = 0.01;
    const auto exact = evolve_exact(s, init, t_max, dt);
    const auto mf = evolve_mean_field(s, init, t_max, dt, Gauge::PhaseFixed);
    auto basis = BipartiteBasis::get(2, 2);

    const auto pts = trajectory_diagnostics(s, exact, mf, dt, basis);
    REQUIRE(pts.size() == exact.size());
    for (const auto& p : pts) {
        CHECK(p.p > 0.0);
        CHECK(p.p <= 1.0);
        CHECK(p.has_beta);
        CHECK(p.beta >= 0.0);
        CHECK(p.fidelity_sq >= 0.0);
        CHECK(p.fidelity_sq <= 1.0);
        CHECK(p.has_bloch);
    }
    const auto mf_pts = mean_field_diagnostics(s, exact, mf, dt, basis);
    for (const auto& p : mf_pts) {
        CHECK(std::abs(p.p - 1.0) <= 1e-8);   // product embedding stays pure
        CHECK(p.beta <= 1e-8);
    }
}
