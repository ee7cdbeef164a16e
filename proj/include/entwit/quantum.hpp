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

#ifndef ENTWIT_QUANTUM_HPP
#define ENTWIT_QUANTUM_HPP

#include <array>
#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "entwit/rng.hpp"

namespace entwit {

using cdouble = std::complex<double>;

/// Operator on two qubits in the product basis |00>, |01>, |10>, |11>.
using ComplexMatrix4 = Eigen::Matrix<cdouble, 4, 4, Eigen::RowMajor>;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kImagResidueTol = 1e-10;

/// Number of stored Pauli expectation values (Gamma_00 = 1 is implicit).
inline constexpr std::size_t kNumFeatures = 15;

/// Position of Gamma_ij inside a FeatureVector; (i, j) != (0, 0), with
/// 0 = identity, 1 = x, 2 = y, 3 = z.
constexpr std::size_t feature_index(int i, int j) { return static_cast<std::size_t>(4 * i + j - 1); }

/// Pauli expectation values Gamma_ij = tr(rho sigma_i (x) sigma_j) in
/// lexicographic (i, j) order, (0,1) first and (3,3) last.
struct FeatureVector {
    std::array<double, kNumFeatures> gamma{};

    double &operator()(int i, int j) { return gamma[feature_index(i, j)]; }
    double operator()(int i, int j) const { return gamma[feature_index(i, j)]; }

    friend bool operator==(const FeatureVector &, const FeatureVector &) = default;
};

/// A validated two-qubit state: Hermitian, unit trace and positive
/// semidefinite within the tolerances above. Construction is the only way
/// to obtain one, so every instance satisfies the invariants.
class DensityMatrix {
  public:
    /// Throws std::invalid_argument when `m` is not a valid state.
    explicit DensityMatrix(const ComplexMatrix4 &m);

    const ComplexMatrix4 &matrix() const noexcept { return m_; }
    double purity() const;

  private:
    ComplexMatrix4 m_;
};

struct EntanglementLabel {
    bool entangled = false;
    double det_pt = 0.0;
};

/// sigma_i (x) sigma_j for all 16 index pairs in lexicographic order;
/// element 0 is the identity.
const std::array<ComplexMatrix4, 16> &pauli_basis();

/// Hilbert-Schmidt-induced random state: G G^dag / tr(G G^dag) with G a
/// 4 x rank matrix of standard complex Gaussians. rank must lie in 1..4.
DensityMatrix random_density_matrix(Rng &rng, int rank = 4);

/// Throws NumericIntegrityError if any trace carries an imaginary part
/// above kImagResidueTol.
FeatureVector features_from_state(const DensityMatrix &rho);

/// (1/4)(I + sum Gamma_ij sigma_i (x) sigma_j). Positivity is not checked.
ComplexMatrix4 state_from_features(const FeatureVector &features);

/// Transpose on qubit B: ((a,b),(c,d)) -> ((a,d),(c,b)).
ComplexMatrix4 partial_transpose(const ComplexMatrix4 &m);

/// Determinant of the partial transpose via full-pivot LU.
double det_partial_transpose(const DensityMatrix &rho);

/// Determinant-sign labeling: entangled iff det of the partial transpose < 0.
EntanglementLabel is_entangled(const DensityMatrix &rho);

/// Smallest eigenvalue of the partial transpose (Hermitian eigensolver).
double min_eigenvalue_pt(const DensityMatrix &rho);

/// p |Psi-><Psi-| + (1 - p) I/4, p in [0, 1].
DensityMatrix werner_state(double p);

FeatureVector twirl_features(const FeatureVector &features);

/// Projection onto states invariant under R_z(t) (x) R_z(t) for every t.
DensityMatrix twirl_cylindrical(const DensityMatrix &rho);

}  // namespace entwit

#endif
