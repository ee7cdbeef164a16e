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
#include <stdexcept>
#include <string>

#include "entwit/errors.hpp"

namespace entwit {
namespace {

using Matrix2 = Eigen::Matrix<cdouble, 2, 2, Eigen::RowMajor>;

std::array<Matrix2, 4> single_qubit_paulis() {
    const cdouble i(0.0, 1.0);
    std::array<Matrix2, 4> s;
    s[0] << 1, 0, 0, 1;
    s[1] << 0, 1, 1, 0;
    s[2] << 0, -i, i, 0;
    s[3] << 1, 0, 0, -1;
    return s;
}

ComplexMatrix4 kron(const Matrix2 &a, const Matrix2 &b) {
    ComplexMatrix4 out;
    for (int r1 = 0; r1 < 2; ++r1)
        for (int c1 = 0; c1 < 2; ++c1)
            for (int r2 = 0; r2 < 2; ++r2)
                for (int c2 = 0; c2 < 2; ++c2)
                    out(2 * r1 + r2, 2 * c1 + c2) = a(r1, c1) * b(r2, c2);
    return out;
}

// tr(A B) without forming the product.
cdouble trace_of_product(const ComplexMatrix4 &a, const ComplexMatrix4 &b) {
    cdouble t = 0.0;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            t += a(r, c) * b(c, r);
    return t;
}

double min_eigenvalue(const ComplexMatrix4 &hermitian) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix4> solver(hermitian, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

}  // namespace

DensityMatrix::DensityMatrix(const ComplexMatrix4 &m) : m_(m) {
    const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (!(herm <= kHermitianTol))
        throw std::invalid_argument("density matrix is not Hermitian (deviation " + std::to_string(herm) + ")");
    const cdouble tr = m.trace();
    if (!(std::abs(tr - 1.0) <= kTraceTol))
        throw std::invalid_argument("density matrix trace differs from 1");
    if (!(min_eigenvalue(m) >= -kPsdTol))
        throw std::invalid_argument("density matrix is not positive semidefinite");
}

double DensityMatrix::purity() const { return trace_of_product(m_, m_).real(); }

const std::array<ComplexMatrix4, 16> &pauli_basis() {
    static const std::array<ComplexMatrix4, 16> basis = [] {
        const auto s = single_qubit_paulis();
        std::array<ComplexMatrix4, 16> b;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                b[4 * i + j] = kron(s[i], s[j]);
        return b;
    }();
    return basis;
}

DensityMatrix random_density_matrix(Rng &rng, int rank) {
    if (rank < 1 || rank > 4)
        throw std::invalid_argument("rank must lie in 1..4, got " + std::to_string(rank));
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::Matrix<cdouble, 4, Eigen::Dynamic> g(4, rank);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < rank; ++c) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(r, c) = cdouble(re, im);
        }
    ComplexMatrix4 m = g * g.adjoint();
    m = (0.5 * (m + m.adjoint())).eval();
    m /= m.trace().real();
    return DensityMatrix(m);
}

FeatureVector features_from_state(const DensityMatrix &rho) {
    const auto &basis = pauli_basis();
    FeatureVector f;
    for (std::size_t k = 0; k < kNumFeatures; ++k) {
        const cdouble t = trace_of_product(rho.matrix(), basis[k + 1]);
        if (std::abs(t.imag()) > kImagResidueTol)
            throw NumericIntegrityError("Pauli expectation " + std::to_string(k + 1) +
                                        " has imaginary part " + std::to_string(t.imag()));
        f.gamma[k] = t.real();
    }
    return f;
}

ComplexMatrix4 state_from_features(const FeatureVector &features) {
    const auto &basis = pauli_basis();
    ComplexMatrix4 m = basis[0];
    for (std::size_t k = 0; k < kNumFeatures; ++k)
        m += features.gamma[k] * basis[k + 1];
    return 0.25 * m;
}

ComplexMatrix4 partial_transpose(const ComplexMatrix4 &m) {
    ComplexMatrix4 out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d)
                    out(2 * a + d, 2 * c + b) = m(2 * a + b, 2 * c + d);
    return out;
}

double det_partial_transpose(const DensityMatrix &rho) {
    const ComplexMatrix4 pt = partial_transpose(rho.matrix());
    const cdouble det = Eigen::FullPivLU<ComplexMatrix4>(pt).determinant();
    if (std::abs(det.imag()) > kImagResidueTol)
        throw NumericIntegrityError("determinant of partial transpose has imaginary residue " +
                                    std::to_string(det.imag()));
    return det.real();
}

EntanglementLabel is_entangled(const DensityMatrix &rho) {
    const double det = det_partial_transpose(rho);
    return {det < 0.0, det};
}

double min_eigenvalue_pt(const DensityMatrix &rho) { return min_eigenvalue(partial_transpose(rho.matrix())); }

DensityMatrix werner_state(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("Werner mixing parameter must lie in [0, 1]");
    // |Psi-> = (|01> - |10>) / sqrt(2)
    ComplexMatrix4 singlet = ComplexMatrix4::Zero();
    singlet(1, 1) = 0.5;
    singlet(2, 2) = 0.5;
    singlet(1, 2) = -0.5;
    singlet(2, 1) = -0.5;
    const ComplexMatrix4 m = p * singlet + (1.0 - p) * 0.25 * ComplexMatrix4::Identity();
    return DensityMatrix(m);
}

FeatureVector twirl_features(const FeatureVector &in) {
    constexpr int X = 1, Y = 2, Z = 3;
    FeatureVector out;
    out(0, Z) = in(0, Z);
    out(Z, 0) = in(Z, 0);
    out(Z, Z) = in(Z, Z);
    const double diag = 0.5 * (in(X, X) + in(Y, Y));
    out(X, X) = diag;
    out(Y, Y) = diag;
    const double anti = 0.5 * (in(X, Y) - in(Y, X));
    out(X, Y) = anti;
    out(Y, X) = -anti;
    return out;
}

DensityMatrix twirl_cylindrical(const DensityMatrix &rho) {
    return DensityMatrix(state_from_features(twirl_features(features_from_state(rho))));
}

}  // namespace entwit
