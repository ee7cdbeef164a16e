// Copyright 2026 The entwit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "entwit/quantum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "entwit/errors.hpp"
#include "gtest/gtest.h"

using namespace entwit;

namespace {

// Test-side constructions, independent of the library's Pauli tables.
ComplexMatrix4 projector(const Eigen::Vector4cd &psi) { return psi * psi.adjoint(); }

Eigen::Vector4cd phi_plus() {
    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return v;
}

Eigen::Vector4cd psi_minus() {
    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    v(1) = 1.0 / std::sqrt(2.0);
    v(2) = -1.0 / std::sqrt(2.0);
    return v;
}

// Partial transpose written as a swap of the B-index inside each 2x2 block.
ComplexMatrix4 oracle_partial_transpose(const ComplexMatrix4 &m) {
    ComplexMatrix4 out;
    for (int ba = 0; ba < 2; ++ba)
        for (int bc = 0; bc < 2; ++bc)
            out.block<2, 2>(2 * ba, 2 * bc) = m.block<2, 2>(2 * ba, 2 * bc).transpose();
    return out;
}

Eigen::Vector4d eigenvalues(const ComplexMatrix4 &h) {
    return Eigen::SelfAdjointEigenSolver<ComplexMatrix4>(h).eigenvalues();
}

double max_abs_diff(const ComplexMatrix4 &a, const ComplexMatrix4 &b) { return (a - b).cwiseAbs().maxCoeff(); }

// R_z(t) (x) R_z(t) with R_z(t) = diag(e^{-it/2}, e^{it/2}).
ComplexMatrix4 joint_rz(double t) {
    const cdouble lo = std::exp(cdouble(0, -t / 2)), hi = std::exp(cdouble(0, t / 2));
    ComplexMatrix4 u = ComplexMatrix4::Zero();
    u(0, 0) = lo * lo;
    u(1, 1) = lo * hi;
    u(2, 2) = hi * lo;
    u(3, 3) = hi * hi;
    return u;
}

}  // namespace

TEST(pauli_basis, identity_and_zz) {
    const auto &b = pauli_basis();
    EXPECT_LT(max_abs_diff(b[0], ComplexMatrix4::Identity()), 1e-15);
    ComplexMatrix4 zz = ComplexMatrix4::Zero();
    zz.diagonal() << 1, -1, -1, 1;
    EXPECT_LT(max_abs_diff(b[15], zz), 1e-15);
}

TEST(pauli_basis, algebra) {
    const auto &b = pauli_basis();
    for (int k = 0; k < 16; ++k) {
        EXPECT_LT(max_abs_diff(b[k], b[k].adjoint()), 1e-15) << k;
        EXPECT_LT(max_abs_diff(b[k] * b[k], ComplexMatrix4::Identity()), 1e-15) << k;
        if (k > 0)
            EXPECT_LT(std::abs(b[k].trace()), 1e-15) << k;
    }
}

TEST(random_density_matrix, satisfies_invariants) {
    Rng rng(11);
    for (int rank = 1; rank <= 4; ++rank)
        for (int k = 0; k < 200; ++k) {
            const auto rho = random_density_matrix(rng, rank);
            const auto &m = rho.matrix();
            EXPECT_LE((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
            EXPECT_NEAR(m.trace().real(), 1.0, 1e-12);
            EXPECT_GE(eigenvalues(m).minCoeff(), -1e-10);
        }
}

TEST(random_density_matrix, rank_one_is_pure) {
    Rng rng(3);
    for (int k = 0; k < 200; ++k)
        EXPECT_NEAR(random_density_matrix(rng, 1).purity(), 1.0, 1e-10);
}

TEST(random_density_matrix, rejects_bad_rank) {
    Rng rng(1);
    EXPECT_THROW(random_density_matrix(rng, 0), std::invalid_argument);
    EXPECT_THROW(random_density_matrix(rng, 5), std::invalid_argument);
}

TEST(random_density_matrix, separable_fraction_is_stable) {
    // Measured once with the eigenvalue oracle over 10^5 rank-4 samples
    // (seed 2024): 0.2432.
    constexpr double kMeasured = 0.2432;
    Rng rng(2024);
    int separable = 0;
    constexpr int n = 100000;
    for (int k = 0; k < n; ++k)
        separable += eigenvalues(oracle_partial_transpose(random_density_matrix(rng).matrix())).minCoeff() >= 0.0;
    const double fraction = static_cast<double>(separable) / n;
    EXPECT_NEAR(fraction, kMeasured, 0.01);
    EXPECT_NEAR(fraction, 0.24, 0.01);
}

TEST(features_from_state, maximally_mixed) {
    const DensityMatrix rho(0.25 * ComplexMatrix4::Identity());
    for (double g : features_from_state(rho).gamma)
        EXPECT_EQ(g, 0.0);
}

TEST(features_from_state, product_zero_state) {
    ComplexMatrix4 m = ComplexMatrix4::Zero();
    m(0, 0) = 1.0;
    const auto f = features_from_state(DensityMatrix(m));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == 0 && j == 0)
                continue;
            const bool one = (i == 0 && j == 3) || (i == 3 && j == 0) || (i == 3 && j == 3);
            EXPECT_NEAR(f(i, j), one ? 1.0 : 0.0, 1e-15) << i << j;
        }
}

TEST(features_from_state, bell_state_against_explicit_traces) {
    // Oracle: traces against hand-written 4x4 Pauli products.
    const cdouble I(0, 1);
    ComplexMatrix4 xx, yy, zz;
    xx << 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0;
    yy << 0, 0, 0, I * I, 0, 0, -I * I, 0, 0, -I * I, 0, 0, I * I, 0, 0, 0;
    zz = ComplexMatrix4::Zero();
    zz.diagonal() << 1, -1, -1, 1;
    const ComplexMatrix4 rho = projector(phi_plus());
    EXPECT_NEAR((rho * xx).trace().real(), 1.0, 1e-15);
    EXPECT_NEAR((rho * yy).trace().real(), -1.0, 1e-15);
    EXPECT_NEAR((rho * zz).trace().real(), 1.0, 1e-15);

    const auto f = features_from_state(DensityMatrix(rho));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == 0 && j == 0)
                continue;
            double expected = 0.0;
            if (i == 1 && j == 1)
                expected = 1.0;
            if (i == 2 && j == 2)
                expected = -1.0;
            if (i == 3 && j == 3)
                expected = 1.0;
            EXPECT_NEAR(f(i, j), expected, 1e-15) << i << j;
        }
}

TEST(state_from_features, zero_features_give_maximally_mixed) {
    EXPECT_LT(max_abs_diff(state_from_features(FeatureVector{}), 0.25 * ComplexMatrix4::Identity()), 1e-16);
}

TEST(state_from_features, round_trip_and_feature_range) {
    Rng rng(5);
    for (int k = 0; k < 1000; ++k) {
        const auto rho = random_density_matrix(rng, 1 + k % 4);
        const auto f = features_from_state(rho);
        for (double g : f.gamma) {
            EXPECT_GE(g, -1.0);
            EXPECT_LE(g, 1.0);
        }
        EXPECT_LE(max_abs_diff(state_from_features(f), rho.matrix()), 1e-12);
    }
}

TEST(state_from_features, unphysical_input_is_not_positive) {
    FeatureVector f;
    f(3, 3) = 2.0;
    const ComplexMatrix4 m = state_from_features(f);
    EXPECT_LT(max_abs_diff(m, m.adjoint()), 1e-16);
    // diag((1+2)/4, (1-2)/4, (1-2)/4, (1+2)/4)
    EXPECT_NEAR(eigenvalues(m).minCoeff(), -0.25, 1e-15);
    EXPECT_THROW(DensityMatrix{m}, std::invalid_argument);
}

TEST(partial_transpose, fixes_diagonal_matrices) {
    ComplexMatrix4 d = ComplexMatrix4::Zero();
    d.diagonal() << 0.1, 0.2, 0.3, 0.4;
    EXPECT_EQ(partial_transpose(d), d);
}

TEST(partial_transpose, bell_state_spectrum) {
    const auto ev = eigenvalues(partial_transpose(projector(phi_plus())));
    EXPECT_NEAR(ev(0), -0.5, 1e-15);
    EXPECT_NEAR(ev(1), 0.5, 1e-15);
    EXPECT_NEAR(ev(2), 0.5, 1e-15);
    EXPECT_NEAR(ev(3), 0.5, 1e-15);
}

TEST(partial_transpose, matches_block_oracle_and_is_involution) {
    Rng rng(9);
    for (int k = 0; k < 200; ++k) {
        const ComplexMatrix4 m = random_density_matrix(rng).matrix();
        const ComplexMatrix4 pt = partial_transpose(m);
        EXPECT_EQ(pt, oracle_partial_transpose(m));
        EXPECT_EQ(partial_transpose(pt), m);
        EXPECT_NEAR(std::abs(pt.trace() - m.trace()), 0.0, 1e-15);
    }
}

TEST(det_partial_transpose, known_values) {
    EXPECT_NEAR(det_partial_transpose(DensityMatrix(0.25 * ComplexMatrix4::Identity())), 1.0 / 256, 1e-15);
    // Product of the singlet's partial-transpose spectrum {1/2, 1/2, 1/2, -1/2}.
    EXPECT_NEAR(det_partial_transpose(DensityMatrix(projector(psi_minus()))), -1.0 / 16, 1e-14);
    EXPECT_NEAR(det_partial_transpose(werner_state(1.0 / 3.0)), 0.0, 1e-12);
}

TEST(det_partial_transpose, equals_product_of_eigenvalues) {
    Rng rng(17);
    for (int k = 0; k < 500; ++k) {
        const auto rho = random_density_matrix(rng);
        const double prod = eigenvalues(oracle_partial_transpose(rho.matrix())).prod();
        EXPECT_NEAR(det_partial_transpose(rho), prod, 1e-14);
    }
}

TEST(is_entangled, product_states_are_separable) {
    Rng rng(21);
    for (int k = 0; k < 300; ++k) {
        const ComplexMatrix4 a = random_density_matrix(rng).matrix();
        const ComplexMatrix4 b = random_density_matrix(rng).matrix();
        // reduced 2x2 states via partial traces, then their tensor product
        Eigen::Matrix2cd ra = Eigen::Matrix2cd::Zero(), rb = Eigen::Matrix2cd::Zero();
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int t = 0; t < 2; ++t) {
                    ra(i, j) += a(2 * i + t, 2 * j + t);
                    rb(i, j) += b(2 * t + i, 2 * t + j);
                }
        ComplexMatrix4 prod;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                prod.block<2, 2>(2 * i, 2 * j) = ra(i, j) * rb;
        prod = (0.5 * (prod + prod.adjoint())).eval();
        EXPECT_FALSE(is_entangled(DensityMatrix(prod)).entangled);
    }
}

TEST(is_entangled, werner_family) {
    EXPECT_TRUE(is_entangled(werner_state(0.5)).entangled);
    EXPECT_FALSE(is_entangled(werner_state(0.2)).entangled);
    // Eigenvalue oracle: spectrum of the partial transpose is
    // {(1+p)/4 x3, (1-3p)/4}.
    EXPECT_NEAR(min_eigenvalue_pt(werner_state(0.5)), (1 - 1.5) / 4, 1e-15);
    EXPECT_NEAR(min_eigenvalue_pt(werner_state(0.2)), (1 - 0.6) / 4, 1e-15);
}

TEST(is_entangled, label_carries_determinant) {
    const auto label = is_entangled(werner_state(0.9));
    EXPECT_TRUE(label.entangled);
    EXPECT_LT(label.det_pt, 0.0);
    EXPECT_EQ(label.det_pt, det_partial_transpose(werner_state(0.9)));
}

TEST(min_eigenvalue_pt, known_values) {
    EXPECT_NEAR(min_eigenvalue_pt(DensityMatrix(0.25 * ComplexMatrix4::Identity())), 0.25, 1e-15);
    EXPECT_NEAR(min_eigenvalue_pt(DensityMatrix(projector(psi_minus()))), -0.5, 1e-15);
}

TEST(min_eigenvalue_pt, sign_agrees_with_determinant) {
    Rng rng(4242);
    int compared = 0;
    for (int k = 0; k < 10000; ++k) {
        const auto rho = random_density_matrix(rng);
        const auto label = is_entangled(rho);
        if (std::abs(label.det_pt) <= 1e-12)
            continue;
        ++compared;
        ASSERT_EQ(min_eigenvalue_pt(rho) < 0.0, label.entangled) << "sample " << k;
    }
    EXPECT_GT(compared, 9900);
}

TEST(werner_state, endpoints_and_range) {
    EXPECT_LT(max_abs_diff(werner_state(0.0).matrix(), 0.25 * ComplexMatrix4::Identity()), 1e-16);
    EXPECT_LT(max_abs_diff(werner_state(1.0).matrix(), projector(psi_minus())), 1e-15);
    EXPECT_NEAR(werner_state(1.0).purity(), 1.0, 1e-15);
    EXPECT_THROW(werner_state(-0.01), std::invalid_argument);
    EXPECT_THROW(werner_state(1.01), std::invalid_argument);
}

TEST(werner_state, boundary_by_bisection) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (is_entangled(werner_state(mid)).entangled ? hi : lo) = mid;
    }
    EXPECT_NEAR(0.5 * (lo + hi), 1.0 / 3.0, 1e-6);
    for (int k = 0; k <= 100; ++k) {
        const double p = k / 100.0;
        EXPECT_EQ(is_entangled(werner_state(p)).entangled, p > 1.0 / 3.0) << p;
    }
}

TEST(twirl_cylindrical, fixes_invariant_states) {
    ComplexMatrix4 d = ComplexMatrix4::Zero();
    d.diagonal() << 0.1, 0.2, 0.3, 0.4;
    EXPECT_LT(max_abs_diff(twirl_cylindrical(DensityMatrix(d)).matrix(), d), 1e-15);
    const ComplexMatrix4 singlet = projector(psi_minus());
    EXPECT_LT(max_abs_diff(twirl_cylindrical(DensityMatrix(singlet)).matrix(), singlet), 1e-15);
}

TEST(twirl_cylindrical, matches_numerical_average) {
    Rng rng(77);
    constexpr int grid = 256;
    for (int k = 0; k < 100; ++k) {
        const auto rho = random_density_matrix(rng);
        ComplexMatrix4 avg = ComplexMatrix4::Zero();
        for (int g = 0; g < grid; ++g) {
            const ComplexMatrix4 u = joint_rz(2.0 * std::numbers::pi * g / grid);
            avg += u * rho.matrix() * u.adjoint();
        }
        avg /= static_cast<double>(grid);
        const auto twirled = twirl_cylindrical(rho);
        EXPECT_LE(max_abs_diff(twirled.matrix(), avg), 1e-10);
        EXPECT_LE(max_abs_diff(twirl_cylindrical(twirled).matrix(), twirled.matrix()), 1e-12);
        EXPECT_NEAR(twirled.matrix().trace().real(), 1.0, 1e-12);
        EXPECT_GE(eigenvalues(twirled.matrix()).minCoeff(), -1e-10);
    }
}

TEST(twirl_cylindrical, feature_structure) {
    Rng rng(8);
    for (int k = 0; k < 100; ++k) {
        const auto f = features_from_state(twirl_cylindrical(random_density_matrix(rng)));
        for (auto [i, j] : {std::pair{0, 1}, {0, 2}, {1, 0}, {2, 0}, {1, 3}, {3, 1}, {2, 3}, {3, 2}})
            EXPECT_NEAR(f(i, j), 0.0, 1e-15);
        EXPECT_NEAR(f(1, 1), f(2, 2), 1e-15);
        EXPECT_NEAR(f(1, 2), -f(2, 1), 1e-15);
    }
}
