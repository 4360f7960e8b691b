// SPDX-License-Identifier: Apache-2.0
//
// mompkit - multidimensional sparse recovery, mmWave channel estimation and
// single-anchor indoor localization
// Copyright (C) 2026 mompkit contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MOMPKIT_RNG_HPP
#define MOMPKIT_RNG_HPP

#include <cstdint>
#include <random>

namespace mompkit
{

// splitmix64-style mixing for deterministic substream derivation; never
// returns the same value for different (stream, substream) pairs in practice.
inline std::uint64_t mix_seed(std::uint64_t stream, std::uint64_t substream)
{
    std::uint64_t z = stream + 0x9e3779b97f4a7c15ULL * (substream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_engine(std::uint64_t seed)
{
    return std::mt19937_64(seed);
}

} // namespace mompkit

#endif
