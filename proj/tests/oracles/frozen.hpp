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

// Fidelities of the corpus against their intended targets.  Computed once with
// the generator-exponential unitaries in oracles.cpp and frozen here.

#pragma once

#include <array>

namespace tiqc::frozen {

inline constexpr double kQftInverse = 0.99999999999999978;
inline constexpr double kQftForward = 0.70000821528500634;
inline constexpr double kPi1 = 1.0;
inline constexpr double kPi2 = 0.57206140281768425;
inline constexpr double kPi3 = 0.37885531593354893;
inline constexpr double kPi3Squared = 0.70710678118654791;
inline constexpr double kPi4 = 0.94657426768304564;
inline constexpr double kPi4Squared = 1.0;
inline constexpr double kPi4SquaredPrinted = 0.71060503412355924;
/// |<k|U_A1|000>|^2.
inline constexpr std::array<double, 8> kA1Populations = {
    0.41587181455063871,  0.41587181455063837, 0.013988588545248017, 0.01398858854524801,
    0.052288471208434259, 0.052288471208434294, 0.017851125695679405, 0.017851125695679492};
inline constexpr double kTolerance = 1e-9;

}  // namespace tiqc::frozen
