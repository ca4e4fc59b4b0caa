// Copyright 2026 The tiqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense linear-algebra substrate: register states, density matrices,
// outcome distributions, unitaries and the fidelity measures built on them.
// All value types are immutable after construction.

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tiqc/types.hpp"

namespace tiqc {

class DensityMatrix;

class PureState {
   public:
    /// Normalizes `amplitudes`; length must be a power of two.
    explicit PureState(Vector amplitudes);

    static PureState basis(int n_qubits, std::size_t index);
    /// Ket from a bit string such as "010" (qubit 0 leftmost).
    static PureState from_bits(std::string_view bits);
    static PureState from_amplitudes(std::span<const Complex> amplitudes);

    int n_qubits() const { return n_; }
    std::size_t dim() const { return static_cast<std::size_t>(amp_.size()); }
    const Vector& amplitudes() const { return amp_; }
    Complex operator[](std::size_t i) const { return amp_(static_cast<Eigen::Index>(i)); }

    DensityMatrix projector() const;

   private:
    int n_;
    Vector amp_;
};

class DensityMatrix {
   public:
    /// Validates Hermiticity, unit trace and positivity within kInvariantTol.
    explicit DensityMatrix(Matrix rho);

    static DensityMatrix maximally_mixed(int n_qubits);
    /// Skips the eigenvalue check; for internal results already known valid.
    static DensityMatrix trusted(Matrix rho);

    int n_qubits() const { return n_; }
    std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }
    const Matrix& matrix() const { return rho_; }
    Complex operator()(std::size_t r, std::size_t c) const {
        return rho_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }

    double purity() const;
    double min_eigenvalue() const;

   private:
    struct TrustedTag {};
    DensityMatrix(Matrix rho, TrustedTag);

    int n_;
    Matrix rho_;
};

class ProbDist {
   public:
    explicit ProbDist(std::vector<double> probabilities);

    /// Normalizes non-negative counts; at least one count must be positive.
    static ProbDist from_counts(std::span<const std::uint64_t> counts);
    static ProbDist uniform(std::size_t size);

    std::size_t size() const { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }
    const std::vector<double>& values() const { return p_; }

   private:
    std::vector<double> p_;
};

class UnitaryMatrix {
   public:
    /// Checks U^dagger U = I within kInvariantTol.
    explicit UnitaryMatrix(Matrix u);

    static UnitaryMatrix identity(int n_qubits);

    std::size_t dim() const { return static_cast<std::size_t>(u_.rows()); }
    int n_qubits() const { return n_; }
    const Matrix& matrix() const { return u_; }
    UnitaryMatrix adjoint() const;

    /// Matrix product: (a * b) applies b first.
    friend UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b);

   private:
    int n_;
    Matrix u_;
};

/// A completely positive map given by Kraus operators on the full space.
/// Unitaries are the single-operator case.
struct ProcessMap {
    std::vector<Matrix> kraus;

    static ProcessMap from_unitary(const UnitaryMatrix& u);
    std::size_t dim() const;
    /// max |sum_k E_k^dagger E_k - I|.
    double completeness_error() const;
};

/// Kronecker product; the combined qubit count may not exceed kMaxQubits.
Matrix kron(const Matrix& a, const Matrix& b);
PureState tensor(const PureState& a, const PureState& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
UnitaryMatrix tensor(const UnitaryMatrix& a, const UnitaryMatrix& b);

PureState apply_unitary(const PureState& state, const UnitaryMatrix& u);
DensityMatrix apply_unitary(const DensityMatrix& rho, const UnitaryMatrix& u);

ProbDist measure_probabilities(const PureState& state);
ProbDist measure_probabilities(const DensityMatrix& rho);

/// Multinomial sample of `shots` outcomes; deterministic for a fixed seed.
std::vector<std::uint64_t> sample_outcomes(const ProbDist& dist, std::uint64_t shots,
                                           std::uint64_t seed);

/// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2.  When either state is
/// pure this reduces to <psi|rho|psi>, which is what gets evaluated.
double state_fidelity(const DensityMatrix& a, const DensityMatrix& b);
double state_fidelity(const PureState& a, const DensityMatrix& b);

/// Normalized Choi state (1/d) sum_ij |i><j| (x) E(|i><j|).
DensityMatrix choi_state(const ProcessMap& map);

/// Fidelity between the normalized Choi states of the two maps.  For two
/// unitaries this equals |Tr(U^dagger V)|^2 / d^2 and ignores global phase.
double process_fidelity(const ProcessMap& a, const ProcessMap& b);
double process_fidelity(const UnitaryMatrix& a, const UnitaryMatrix& b);

/// Reduced state on the (sorted, unique) qubits in `keep`.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);

}  // namespace tiqc
