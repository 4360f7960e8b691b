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

#ifndef MOMPKIT_TENSOR_HPP
#define MOMPKIT_TENSOR_HPP

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mompkit/errors.hpp"

namespace mompkit
{

using cxd = std::complex<double>;

// Coordinate tuple into a tensor or a multidimensional dictionary. Comparison
// is lexicographic (std::vector semantics), which is the tie-break order used
// throughout the solver.
using MultiIndex = std::vector<Eigen::Index>;

// Dense complex tensor of runtime rank. Memory layout is row-major: the last
// index varies fastest, so flat(i_0,...,i_{r-1}) = (((i_0*d_1)+i_1)*d_2+...).
// A rank-0 tensor is a scalar with one entry.
class Tensor
{
  public:
    Tensor() = default;

    // Zero-initialized tensor of the given shape. All extents must be >= 1.
    explicit Tensor(std::vector<Eigen::Index> shape);

    // Wraps existing flat data (row-major). Throws if sizes do not agree.
    Tensor(std::vector<Eigen::Index> shape, Eigen::VectorXcd flat_data);

    Eigen::Index rank() const { return static_cast<Eigen::Index>(shape_.size()); }
    const std::vector<Eigen::Index> &shape() const { return shape_; }
    Eigen::Index dim(Eigen::Index k) const;
    Eigen::Index size() const { return data_.size(); }

    // Row-major flat offset of a coordinate tuple; bounds-checked.
    Eigen::Index flat_index(const MultiIndex &idx) const;

    cxd &operator()(const MultiIndex &idx) { return data_[flat_index(idx)]; }
    const cxd &operator()(const MultiIndex &idx) const { return data_[flat_index(idx)]; }

    Eigen::VectorXcd &flat() { return data_; }
    const Eigen::VectorXcd &flat() const { return data_; }

    double norm() const { return data_.norm(); }

    // (number of elements before dim k, extent of k, number after k) for the
    // row-major matricizations used by the contraction kernels.
    void split_at(Eigen::Index k, Eigen::Index &outer, Eigen::Index &mid, Eigen::Index &inner) const;

  private:
    std::vector<Eigen::Index> shape_;
    Eigen::VectorXcd data_;
};

// Contracts dimension `dim` of `t` with a vector: out[..] = sum_i t[.., i, ..] * v[i].
// The result drops that dimension; remaining dimensions keep their order.
Tensor contract_dim(const Tensor &t, Eigen::Index dim, const Eigen::Ref<const Eigen::VectorXcd> &v);

// Contracts the listed (dimension, vector) pairs. Duplicate dimensions, out of
// range dimensions or length mismatches throw shape_error naming the axis.
Tensor contract_partial(const Tensor &t, const std::vector<std::pair<Eigen::Index, Eigen::VectorXcd>> &along);

// Contracts dimensions 1..rank-1 with one vector each (vectors[i] pairs with
// dimension 1+i), leaving the length-dim(0) vector along the leading axis.
Eigen::VectorXcd contract_full(const Tensor &t, const std::vector<Eigen::VectorXcd> &vectors);

// Per-atom energies: out[j] = squared Frobenius norm of t contracted along
// `dim` with column j of `atoms`. This is the workhorse behind both the
// initialization and the refinement scores.
Eigen::VectorXd atom_energies(const Tensor &t, Eigen::Index dim, const Eigen::Ref<const Eigen::MatrixXcd> &atoms);

// Default cap on materialized entries for flattened Kronecker products
// (2^28 complex doubles = 4 GiB).
inline constexpr Eigen::Index kron_entry_cap = Eigen::Index(1) << 28;

// Explicit Kronecker product of the factor list, in order. Row and column of
// the result linearize the per-factor indices with the last factor fastest,
// matching the Tensor layout. Exceeding `max_entries` throws resource_error.
Eigen::MatrixXcd kron_flatten(const std::vector<Eigen::MatrixXcd> &factors, Eigen::Index max_entries = kron_entry_cap);

} // namespace mompkit

#endif
