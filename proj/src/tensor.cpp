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

#include "mompkit/tensor.hpp"

#include <algorithm>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace mompkit
{

using RowMat = Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<const RowMat>;

static Eigen::Index checked_volume(const std::vector<Eigen::Index> &shape)
{
    Eigen::Index n = 1;
    for (std::size_t k = 0; k < shape.size(); ++k)
    {
        if (shape[k] < 1)
            throw shape_error("tensor dimension " + std::to_string(k) + " has non-positive extent " +
                              std::to_string(shape[k]));
        n *= shape[k];
    }
    return n;
}

Tensor::Tensor(std::vector<Eigen::Index> shape) : shape_(std::move(shape))
{
    data_ = Eigen::VectorXcd::Zero(checked_volume(shape_));
}

Tensor::Tensor(std::vector<Eigen::Index> shape, Eigen::VectorXcd flat_data)
    : shape_(std::move(shape)), data_(std::move(flat_data))
{
    if (checked_volume(shape_) != data_.size())
        throw shape_error("tensor shape volume " + std::to_string(checked_volume(shape_)) +
                          " does not match flat data length " + std::to_string(data_.size()));
}

Eigen::Index Tensor::dim(Eigen::Index k) const
{
    if (k < 0 || k >= rank())
        throw shape_error("tensor dimension " + std::to_string(k) + " out of range for rank " +
                          std::to_string(rank()));
    return shape_[static_cast<std::size_t>(k)];
}

Eigen::Index Tensor::flat_index(const MultiIndex &idx) const
{
    if (static_cast<Eigen::Index>(idx.size()) != rank())
        throw shape_error("index tuple of length " + std::to_string(idx.size()) + " for tensor of rank " +
                          std::to_string(rank()));
    Eigen::Index flat = 0;
    for (std::size_t k = 0; k < idx.size(); ++k)
    {
        if (idx[k] < 0 || idx[k] >= shape_[k])
            throw shape_error("index " + std::to_string(idx[k]) + " out of bounds for dimension " +
                              std::to_string(k) + " of extent " + std::to_string(shape_[k]));
        flat = flat * shape_[k] + idx[k];
    }
    return flat;
}

void Tensor::split_at(Eigen::Index k, Eigen::Index &outer, Eigen::Index &mid, Eigen::Index &inner) const
{
    mid = dim(k);
    outer = 1;
    for (Eigen::Index d = 0; d < k; ++d)
        outer *= shape_[static_cast<std::size_t>(d)];
    inner = 1;
    for (Eigen::Index d = k + 1; d < rank(); ++d)
        inner *= shape_[static_cast<std::size_t>(d)];
}

Tensor contract_dim(const Tensor &t, Eigen::Index dim, const Eigen::Ref<const Eigen::VectorXcd> &v)
{
    Eigen::Index outer, mid, inner;
    t.split_at(dim, outer, mid, inner);
    if (v.size() != mid)
        throw shape_error("vector of length " + std::to_string(v.size()) + " contracted against dimension " +
                          std::to_string(dim) + " of extent " + std::to_string(mid));

    Eigen::VectorXcd out(outer * inner);
    const cxd *src = t.flat().data();
    if (inner == 1)
    {
        RowMap m(src, outer, mid);
        out.noalias() = m * v;
    }
    else
    {
        for (Eigen::Index o = 0; o < outer; ++o)
        {
            RowMap m(src + o * mid * inner, mid, inner);
            out.segment(o * inner, inner).noalias() = m.transpose() * v;
        }
    }

    std::vector<Eigen::Index> shape;
    shape.reserve(static_cast<std::size_t>(t.rank() - 1));
    for (Eigen::Index d = 0; d < t.rank(); ++d)
        if (d != dim)
            shape.push_back(t.shape()[static_cast<std::size_t>(d)]);
    return Tensor(std::move(shape), std::move(out));
}

Tensor contract_partial(const Tensor &t, const std::vector<std::pair<Eigen::Index, Eigen::VectorXcd>> &along)
{
    std::vector<std::size_t> order(along.size());
    for (std::size_t i = 0; i < along.size(); ++i)
    {
        const Eigen::Index d = along[i].first;
        if (d < 0 || d >= t.rank())
            throw shape_error("contraction dimension " + std::to_string(d) + " out of range for rank " +
                              std::to_string(t.rank()));
        order[i] = i;
    }
    // Contract from the highest dimension down so earlier positions stay valid.
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return along[a].first > along[b].first; });
    for (std::size_t i = 1; i < order.size(); ++i)
        if (along[order[i - 1]].first == along[order[i]].first)
            throw shape_error("dimension " + std::to_string(along[order[i]].first) +
                              " listed twice in contraction");

    Tensor cur = t;
    bool first = true;
    for (std::size_t i : order)
    {
        if (first)
        {
            cur = contract_dim(t, along[i].first, along[i].second);
            first = false;
        }
        else
            cur = contract_dim(cur, along[i].first, along[i].second);
    }
    return cur;
}

Eigen::VectorXcd contract_full(const Tensor &t, const std::vector<Eigen::VectorXcd> &vectors)
{
    if (static_cast<Eigen::Index>(vectors.size()) != t.rank() - 1)
        throw shape_error("contract_full over tensor of rank " + std::to_string(t.rank()) + " needs " +
                          std::to_string(t.rank() - 1) + " vectors, got " + std::to_string(vectors.size()));
    Tensor cur = t;
    for (Eigen::Index d = t.rank() - 1; d >= 1; --d)
        cur = contract_dim(cur, d, vectors[static_cast<std::size_t>(d - 1)]);
    return cur.flat();
}

Eigen::VectorXd atom_energies(const Tensor &t, Eigen::Index dim, const Eigen::Ref<const Eigen::MatrixXcd> &atoms)
{
    Eigen::Index outer, mid, inner;
    t.split_at(dim, outer, mid, inner);
    if (atoms.rows() != mid)
        throw shape_error("atom length " + std::to_string(atoms.rows()) + " contracted against dimension " +
                          std::to_string(dim) + " of extent " + std::to_string(mid));

    Eigen::VectorXd out = Eigen::VectorXd::Zero(atoms.cols());
    const cxd *src = t.flat().data();
    if (inner == 1)
    {
        RowMap m(src, outer, mid);
        out = (m * atoms).colwise().squaredNorm();
    }
    else
    {
        Eigen::MatrixXcd g(inner, atoms.cols());
        for (Eigen::Index o = 0; o < outer; ++o)
        {
            RowMap m(src + o * mid * inner, mid, inner);
            g.noalias() = m.transpose() * atoms;
            out += g.colwise().squaredNorm();
        }
    }
    return out;
}

Eigen::MatrixXcd kron_flatten(const std::vector<Eigen::MatrixXcd> &factors, Eigen::Index max_entries)
{
    if (factors.empty())
        throw shape_error("kron_flatten needs at least one factor");
    double entries = 1.0;
    for (std::size_t k = 0; k < factors.size(); ++k)
    {
        if (factors[k].rows() < 1 || factors[k].cols() < 1)
            throw shape_error("kron_flatten factor " + std::to_string(k) + " is empty");
        entries *= static_cast<double>(factors[k].rows()) * static_cast<double>(factors[k].cols());
        if (entries > static_cast<double>(max_entries))
            throw resource_error("flattened dictionary would hold " + std::to_string(entries) +
                                 " entries, above the cap of " + std::to_string(max_entries));
    }

    Eigen::MatrixXcd acc = factors[0];
    for (std::size_t k = 1; k < factors.size(); ++k)
        acc = Eigen::kroneckerProduct(acc, factors[k]).eval();
    return acc;
}

} // namespace mompkit
