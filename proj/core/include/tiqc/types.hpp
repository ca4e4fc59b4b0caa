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

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tiqc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Mat2 = Eigen::Matrix2cd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Largest register handled by the dense simulator.
inline constexpr int kMaxQubits = 12;

/// Tolerance used for state/operator invariants throughout the library.
inline constexpr double kInvariantTol = 1e-9;

// Basis convention
// ----------------
// Qubit q (0-based, q = 0 is "ion 1" in sequence text) is bit position q
// counted from the left of a printed ket |b_0 b_1 ... b_{n-1}>.  The basis
// index is therefore  sum_q b_q * 2^(n-1-q):  qubit 0 is the most
// significant bit.  b = 0 is the metastable D state, b = 1 the S ground
// state.  Every routine that touches bit positions goes through qubit_mask().
inline std::size_t qubit_mask(int n_qubits, int qubit) {
    return std::size_t{1} << (n_qubits - 1 - qubit);
}

inline int bit_of(std::size_t index, int n_qubits, int qubit) {
    return (index & qubit_mask(n_qubits, qubit)) ? 1 : 0;
}

/// Input that violates a documented precondition or invariant.
class ValidationError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative procedure stopped before reaching its target.
class ConvergenceError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

inline std::size_t dim_for(int n_qubits) {
    require(n_qubits >= 0 && n_qubits <= kMaxQubits,
            "qubit count " + std::to_string(n_qubits) + " outside [0, " +
                std::to_string(kMaxQubits) + "]");
    return std::size_t{1} << n_qubits;
}

}  // namespace tiqc
