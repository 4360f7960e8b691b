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

#ifndef MOMPKIT_SOLVER_HPP
#define MOMPKIT_SOLVER_HPP

#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mompkit/tensor.hpp"

namespace mompkit
{

// One dictionary per tensor dimension: atoms[k] has one column per atom of
// size N_k^s. Dimension k of the dictionary pairs with dimension 1+k of the
// measurement tensor (dimension 0 is the measurement axis).
struct DictionarySet
{
    std::vector<Eigen::MatrixXcd> atoms;

    Eigen::Index n_dims() const { return static_cast<Eigen::Index>(atoms.size()); }
    Eigen::Index atom_size(Eigen::Index k) const { return atoms[static_cast<std::size_t>(k)].rows(); }
    Eigen::Index atom_count(Eigen::Index k) const { return atoms[static_cast<std::size_t>(k)].cols(); }
    void validate() const;
};

// observation: N^q x N^m (one column per measurement vector).
// measurement: tensor of shape [N^q, N_1^s, ..., N_D^s].
struct SparseProblem
{
    Eigen::MatrixXcd observation;
    Tensor measurement;
    DictionarySet dictionaries;

    void validate() const;
};

// full: initialization scores are ratios of projected over measurement energy.
// numerator_only: the denominator is dropped (cheaper, coarser).
enum class InitCoefficientMode
{
    full,
    numerator_only
};

struct SolverConfig
{
    Eigen::Index sparsity = 1;          // number of support tuples to extract
    Eigen::Index refinement_sweeps = 3; // alternating per-dimension passes per tuple
    InitCoefficientMode init_mode = InitCoefficientMode::full;
    double coarse_init_factor = 1.0;    // fraction of atoms scanned at initialization, in (0, 1]
    double stop_tol = 0.0;              // minimum relative residual decrease to keep a tuple

    void validate() const;
};

struct SparseSolution
{
    std::vector<MultiIndex> support;      // one atom tuple per extracted component
    Eigen::MatrixXcd coefficients;        // support.size() x N^m, joint least-squares fit
    std::vector<double> residual_norms;   // ||O||_F followed by the norm after each accepted tuple
    bool rank_deficient = false;          // some least-squares step hit a rank-deficient basis
};

// Projected observation O_phi of shape [N^m, N_1^s, ..., N_D^s]:
// O_phi[:, i] = residual^H Phi[:, i] for every cell i.
Tensor project_observation(const Eigen::MatrixXcd &residual, const Tensor &measurement);

// Best atom of dimension `dim` given the atoms already fixed for the
// dimensions in `estimated` (dictionary-dim -> atom index). Free dimensions
// are absorbed into the Frobenius norms of the score. Ties break to the
// lowest index; atoms whose measurement energy is zero are skipped; if every
// candidate is skipped a degenerate_problem_error is thrown.
Eigen::Index init_dimension(Eigen::Index dim, const Tensor &projected, const Tensor &measurement,
                            const DictionarySet &dicts, const std::map<Eigen::Index, Eigen::Index> &estimated,
                            const SolverConfig &config);

// Best atom of dimension `dim` with every other dimension fixed to `current`.
// The score is the exact per-column objective (projected energy over
// measurement energy), so the value at the returned index is never below the
// value at current[dim]. Skipping and error behavior as in init_dimension.
Eigen::Index refine_dimension(Eigen::Index dim, const Tensor &projected, const Tensor &measurement,
                              const DictionarySet &dicts, const MultiIndex &current);

// Brute-force scan of every atom tuple; returns the maximizing tuple and its
// score. Intended as an oracle at small sizes; cost is the full product of
// atom counts.
std::pair<MultiIndex, double> exhaustive_projection(const Eigen::MatrixXcd &residual, const Tensor &measurement,
                                                    const DictionarySet &dicts);

struct LeastSquaresFit
{
    Eigen::MatrixXcd coefficients; // columns.cols() x N^m
    Eigen::MatrixXcd residual;     // N^q x N^m
    bool rank_deficient = false;
};

// Joint least-squares refit of the observation on the given basis columns,
// using a rank-revealing decomposition (minimum-norm solution when the basis
// is rank deficient).
LeastSquaresFit residual_update(const Eigen::MatrixXcd &observation, const Eigen::MatrixXcd &columns);

// Effective measurement column of one atom tuple: the tensor contracted with
// the selected atom of every dictionary.
Eigen::VectorXcd effective_column(const Tensor &measurement, const DictionarySet &dicts, const MultiIndex &atom);

// Greedy multidimensional matching pursuit: per component, project the
// residual, initialize the atom tuple dimension by dimension, refine it with
// alternating sweeps (early exit when a sweep changes nothing), then jointly
// refit all selected components. A tuple already in the support triggers a
// re-initialization from the next-best first-dimension candidate; when
// stop_tol > 0, a tuple whose relative residual decrease falls below it is
// rolled back and the solve stops.
SparseSolution momp_solve(const SparseProblem &problem, const SolverConfig &config);

// Classical single-dictionary orthogonal matching pursuit over the flattened
// problem, with the same stopping, tie-break and duplicate policies. The
// one-dimensional momp_solve reduces to this.
SparseSolution omp_solve(const Eigen::MatrixXcd &observation, const Eigen::MatrixXcd &flat_measurement,
                         const Eigen::MatrixXcd &flat_dictionary, const SolverConfig &config);

} // namespace mompkit

#endif
