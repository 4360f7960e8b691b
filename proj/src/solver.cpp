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

#include "mompkit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mompkit
{

using RowMat = Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<const RowMat>;

void DictionarySet::validate() const
{
    if (atoms.empty())
        throw shape_error("dictionary set is empty");
    for (std::size_t k = 0; k < atoms.size(); ++k)
        if (atoms[k].rows() < 1 || atoms[k].cols() < 1)
            throw shape_error("dictionary " + std::to_string(k) + " is empty");
}

void SparseProblem::validate() const
{
    dictionaries.validate();
    if (measurement.rank() != dictionaries.n_dims() + 1)
        throw shape_error("measurement tensor of rank " + std::to_string(measurement.rank()) + " for " +
                          std::to_string(dictionaries.n_dims()) + " dictionaries");
    for (Eigen::Index k = 0; k < dictionaries.n_dims(); ++k)
        if (measurement.dim(1 + k) != dictionaries.atom_size(k))
            throw shape_error("tensor dimension " + std::to_string(1 + k) + " of extent " +
                              std::to_string(measurement.dim(1 + k)) + " does not match atom size " +
                              std::to_string(dictionaries.atom_size(k)) + " of dictionary " + std::to_string(k));
    if (observation.rows() != measurement.dim(0))
        throw shape_error("observation has " + std::to_string(observation.rows()) +
                          " rows but the measurement axis has extent " + std::to_string(measurement.dim(0)));
    if (observation.cols() < 1)
        throw shape_error("observation holds no measurement columns");
}

void SolverConfig::validate() const
{
    if (sparsity < 1)
        throw config_error("sparsity must be at least 1");
    if (refinement_sweeps < 0)
        throw config_error("refinement_sweeps must be non-negative");
    if (!(coarse_init_factor > 0.0) || coarse_init_factor > 1.0)
        throw config_error("coarse_init_factor must lie in (0, 1]");
    if (std::isnan(stop_tol) || stop_tol < 0.0)
        throw config_error("stop_tol must be non-negative");
}

Tensor project_observation(const Eigen::MatrixXcd &residual, const Tensor &measurement)
{
    if (measurement.rank() < 1)
        throw shape_error("measurement tensor has rank 0");
    if (residual.rows() != measurement.dim(0))
        throw shape_error("residual has " + std::to_string(residual.rows()) +
                          " rows but the measurement axis has extent " + std::to_string(measurement.dim(0)));

    const Eigen::Index cells = measurement.size() / measurement.dim(0);
    RowMap phi(measurement.flat().data(), measurement.dim(0), cells);
    Eigen::MatrixXcd proj = residual.adjoint() * phi; // N^m x cells

    std::vector<Eigen::Index> shape = measurement.shape();
    shape[0] = residual.cols();
    Eigen::VectorXcd flat(proj.size());
    Eigen::Map<RowMat>(flat.data(), proj.rows(), proj.cols()) = proj;
    return Tensor(std::move(shape), std::move(flat));
}

namespace
{

struct DimScores
{
    std::vector<Eigen::Index> candidates; // absolute atom indices scanned
    Eigen::VectorXd score;
    std::vector<char> valid; // zero-energy atoms are skipped
};

std::vector<Eigen::Index> candidate_indices(Eigen::Index atom_count, double coarse_factor)
{
    const Eigen::Index count =
        std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::floor(coarse_factor * static_cast<double>(atom_count))));
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(count));
    for (Eigen::Index t = 0; t < count; ++t)
        idx[static_cast<std::size_t>(t)] =
            static_cast<Eigen::Index>(std::floor(static_cast<double>(t) * static_cast<double>(atom_count) /
                                                 static_cast<double>(count)));
    return idx;
}

// Scores every candidate atom of `dim` with the dimensions in `estimated`
// contracted away; the remaining free dimensions are absorbed into the
// Frobenius norms. With full_ratio the measurement energy divides the score.
DimScores score_dimension(Eigen::Index dim, const Tensor &projected, const Tensor &measurement,
                          const DictionarySet &dicts, const std::map<Eigen::Index, Eigen::Index> &estimated,
                          bool full_ratio, double coarse_factor)
{
    const Eigen::Index n_dims = dicts.n_dims();
    if (dim < 0 || dim >= n_dims)
        throw shape_error("dictionary dimension " + std::to_string(dim) + " out of range for " +
                          std::to_string(n_dims) + " dictionaries");
    if (estimated.count(dim))
        throw shape_error("dimension " + std::to_string(dim) + " is already fixed");

    std::vector<std::pair<Eigen::Index, Eigen::VectorXcd>> along;
    along.reserve(estimated.size());
    for (const auto &[d, j] : estimated)
    {
        if (d < 0 || d >= n_dims)
            throw shape_error("fixed dimension " + std::to_string(d) + " out of range");
        if (j < 0 || j >= dicts.atom_count(d))
            throw shape_error("atom " + std::to_string(j) + " out of range for dimension " + std::to_string(d));
        along.emplace_back(1 + d, dicts.atoms[static_cast<std::size_t>(d)].col(j));
    }

    // Position of `dim` after the fixed dimensions are contracted away.
    Eigen::Index pos = 1;
    for (Eigen::Index d = 0; d < dim; ++d)
        if (!estimated.count(d))
            ++pos;

    DimScores out;
    out.candidates = candidate_indices(dicts.atom_count(dim), coarse_factor);
    const Eigen::Index n_cand = static_cast<Eigen::Index>(out.candidates.size());

    const Eigen::MatrixXcd &psi = dicts.atoms[static_cast<std::size_t>(dim)];
    Eigen::MatrixXcd cand_cols;
    const bool all_atoms = n_cand == psi.cols();
    if (!all_atoms)
    {
        cand_cols.resize(psi.rows(), n_cand);
        for (Eigen::Index t = 0; t < n_cand; ++t)
            cand_cols.col(t) = psi.col(out.candidates[static_cast<std::size_t>(t)]);
    }
    const Eigen::Ref<const Eigen::MatrixXcd> cols = all_atoms ? psi : cand_cols;

    Tensor proj_cut = contract_partial(projected, along);
    Eigen::VectorXd num = atom_energies(proj_cut, pos, cols);

    out.valid.assign(static_cast<std::size_t>(n_cand), 1);
    if (full_ratio)
    {
        Tensor meas_cut = contract_partial(measurement, along);
        Eigen::VectorXd den = atom_energies(meas_cut, pos, cols);
        out.score = Eigen::VectorXd::Zero(n_cand);
        for (Eigen::Index t = 0; t < n_cand; ++t)
        {
            if (den[t] == 0.0)
                out.valid[static_cast<std::size_t>(t)] = 0;
            else
                out.score[t] = num[t] / den[t];
        }
    }
    else
        out.score = std::move(num);
    return out;
}

// Index of the rank-th best valid candidate (score descending, atom index
// ascending on ties); nullopt when fewer than rank+1 candidates are valid.
std::optional<Eigen::Index> ranked_pick(const DimScores &s, Eigen::Index rank)
{
    std::vector<Eigen::Index> order;
    order.reserve(s.candidates.size());
    for (std::size_t t = 0; t < s.candidates.size(); ++t)
        if (s.valid[t])
            order.push_back(static_cast<Eigen::Index>(t));
    if (rank >= static_cast<Eigen::Index>(order.size()))
        return std::nullopt;
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (s.score[a] != s.score[b])
            return s.score[a] > s.score[b];
        return s.candidates[static_cast<std::size_t>(a)] < s.candidates[static_cast<std::size_t>(b)];
    });
    return s.candidates[static_cast<std::size_t>(order[static_cast<std::size_t>(rank)])];
}

std::map<Eigen::Index, Eigen::Index> all_but(const MultiIndex &current, Eigen::Index dim)
{
    std::map<Eigen::Index, Eigen::Index> fixed;
    for (std::size_t d = 0; d < current.size(); ++d)
        if (static_cast<Eigen::Index>(d) != dim)
            fixed[static_cast<Eigen::Index>(d)] = current[d];
    return fixed;
}

// One tuple selection: dimension-by-dimension initialization followed by
// alternating refinement. `first_rank` picks the candidate rank for the first
// initialized dimension (used to re-seed after a duplicate); `seed` reports
// the tuple before refinement.
MultiIndex build_tuple(const Tensor &projected, const Tensor &measurement, const DictionarySet &dicts,
                       const SolverConfig &config, Eigen::Index first_rank, bool &rank_available, MultiIndex &seed)
{
    const Eigen::Index n_dims = dicts.n_dims();
    std::map<Eigen::Index, Eigen::Index> estimated;
    for (Eigen::Index k = 0; k < n_dims; ++k)
    {
        DimScores s = score_dimension(k, projected, measurement, dicts, estimated,
                                      config.init_mode == InitCoefficientMode::full, config.coarse_init_factor);
        std::optional<Eigen::Index> pick = ranked_pick(s, k == 0 ? first_rank : 0);
        if (!pick)
        {
            if (k == 0 && first_rank > 0)
            {
                rank_available = false;
                return {};
            }
            throw degenerate_problem_error("every candidate atom of dimension " + std::to_string(k) +
                                           " has zero measurement energy");
        }
        estimated[k] = *pick;
    }
    rank_available = true;

    MultiIndex tuple(static_cast<std::size_t>(n_dims));
    for (Eigen::Index k = 0; k < n_dims; ++k)
        tuple[static_cast<std::size_t>(k)] = estimated[k];
    seed = tuple;

    for (Eigen::Index sweep = 0; sweep < config.refinement_sweeps; ++sweep)
    {
        bool changed = false;
        for (Eigen::Index k = 0; k < n_dims; ++k)
        {
            const Eigen::Index j = refine_dimension(k, projected, measurement, dicts, tuple);
            if (j != tuple[static_cast<std::size_t>(k)])
            {
                tuple[static_cast<std::size_t>(k)] = j;
                changed = true;
            }
        }
        if (!changed)
            break;
    }
    return tuple;
}

std::optional<MultiIndex> select_support_tuple(const Tensor &projected, const Tensor &measurement,
                                               const DictionarySet &dicts, const SolverConfig &config,
                                               const std::vector<MultiIndex> &support)
{
    const auto is_new = [&](const MultiIndex &t) {
        return std::find(support.begin(), support.end(), t) == support.end();
    };
    const Eigen::Index max_rank = dicts.atom_count(0);
    for (Eigen::Index rank = 0; rank < max_rank; ++rank)
    {
        bool rank_available = true;
        MultiIndex seed;
        MultiIndex tuple = build_tuple(projected, measurement, dicts, config, rank, rank_available, seed);
        if (!rank_available)
            return std::nullopt;
        if (is_new(tuple))
            return tuple;
        // Refinement collapsed onto an existing tuple; keep the diversified
        // initialization itself if it is new, otherwise re-seed again.
        if (is_new(seed))
            return seed;
    }
    return std::nullopt;
}

} // namespace

Eigen::Index init_dimension(Eigen::Index dim, const Tensor &projected, const Tensor &measurement,
                            const DictionarySet &dicts, const std::map<Eigen::Index, Eigen::Index> &estimated,
                            const SolverConfig &config)
{
    DimScores s = score_dimension(dim, projected, measurement, dicts, estimated,
                                  config.init_mode == InitCoefficientMode::full, config.coarse_init_factor);
    std::optional<Eigen::Index> pick = ranked_pick(s, 0);
    if (!pick)
        throw degenerate_problem_error("every candidate atom of dimension " + std::to_string(dim) +
                                       " has zero measurement energy");
    return *pick;
}

Eigen::Index refine_dimension(Eigen::Index dim, const Tensor &projected, const Tensor &measurement,
                              const DictionarySet &dicts, const MultiIndex &current)
{
    if (static_cast<Eigen::Index>(current.size()) != dicts.n_dims())
        throw shape_error("tuple of length " + std::to_string(current.size()) + " for " +
                          std::to_string(dicts.n_dims()) + " dictionaries");
    DimScores s = score_dimension(dim, projected, measurement, dicts, all_but(current, dim), true, 1.0);
    std::optional<Eigen::Index> pick = ranked_pick(s, 0);
    if (!pick)
        throw degenerate_problem_error("every atom of dimension " + std::to_string(dim) +
                                       " has zero measurement energy at the current tuple");
    return *pick;
}

std::pair<MultiIndex, double> exhaustive_projection(const Eigen::MatrixXcd &residual, const Tensor &measurement,
                                                    const DictionarySet &dicts)
{
    dicts.validate();
    const Eigen::Index n_dims = dicts.n_dims();
    if (measurement.rank() != n_dims + 1)
        throw shape_error("measurement tensor of rank " + std::to_string(measurement.rank()) + " for " +
                          std::to_string(n_dims) + " dictionaries");
    if (residual.rows() != measurement.dim(0))
        throw shape_error("residual has " + std::to_string(residual.rows()) +
                          " rows but the measurement axis has extent " + std::to_string(measurement.dim(0)));

    // Fold sizes after contracting the trailing dimensions one by one.
    std::vector<Eigen::Index> fold_size(static_cast<std::size_t>(n_dims) + 1);
    fold_size[0] = measurement.dim(0);
    for (Eigen::Index k = 0; k < n_dims; ++k)
        fold_size[static_cast<std::size_t>(k) + 1] = fold_size[static_cast<std::size_t>(k)] * measurement.dim(1 + k);
    std::vector<Eigen::VectorXcd> level(static_cast<std::size_t>(n_dims));
    for (Eigen::Index k = 0; k < n_dims; ++k)
        level[static_cast<std::size_t>(k)].resize(fold_size[static_cast<std::size_t>(k)]);

    MultiIndex tuple(static_cast<std::size_t>(n_dims), 0);
    MultiIndex best;
    double best_score = -1.0;
    bool any = false;

    while (true)
    {
        // Full fold of the tensor against the current tuple, trailing first.
        const cxd *src = measurement.flat().data();
        for (Eigen::Index k = n_dims - 1; k >= 0; --k)
        {
            const Eigen::MatrixXcd &psi = dicts.atoms[static_cast<std::size_t>(k)];
            RowMap m(src, fold_size[static_cast<std::size_t>(k)], psi.rows());
            level[static_cast<std::size_t>(k)].noalias() = m * psi.col(tuple[static_cast<std::size_t>(k)]);
            src = level[static_cast<std::size_t>(k)].data();
        }
        const Eigen::VectorXcd &col = level[0];
        const double den = col.squaredNorm();
        if (den != 0.0)
        {
            const double score = (residual.adjoint() * col).squaredNorm() / den;
            if (!any || score > best_score)
            {
                any = true;
                best_score = score;
                best = tuple;
            }
        }

        // Odometer step in lexicographic order, last dimension fastest.
        Eigen::Index k = n_dims - 1;
        for (; k >= 0; --k)
        {
            if (++tuple[static_cast<std::size_t>(k)] < dicts.atom_count(k))
                break;
            tuple[static_cast<std::size_t>(k)] = 0;
        }
        if (k < 0)
            break;
    }

    if (!any)
        throw degenerate_problem_error("every atom tuple has zero measurement energy");
    return {best, best_score};
}

LeastSquaresFit residual_update(const Eigen::MatrixXcd &observation, const Eigen::MatrixXcd &columns)
{
    if (columns.cols() > 0 && columns.rows() != observation.rows())
        throw shape_error("basis has " + std::to_string(columns.rows()) + " rows but the observation has " +
                          std::to_string(observation.rows()));

    LeastSquaresFit fit;
    if (columns.cols() == 0)
    {
        fit.coefficients = Eigen::MatrixXcd(0, observation.cols());
        fit.residual = observation;
        return fit;
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(columns);
    fit.coefficients = cod.solve(observation);
    fit.residual = observation - columns * fit.coefficients;
    fit.rank_deficient = cod.rank() < columns.cols();
    return fit;
}

Eigen::VectorXcd effective_column(const Tensor &measurement, const DictionarySet &dicts, const MultiIndex &atom)
{
    if (static_cast<Eigen::Index>(atom.size()) != dicts.n_dims())
        throw shape_error("tuple of length " + std::to_string(atom.size()) + " for " +
                          std::to_string(dicts.n_dims()) + " dictionaries");
    std::vector<Eigen::VectorXcd> vectors;
    vectors.reserve(atom.size());
    for (std::size_t k = 0; k < atom.size(); ++k)
    {
        const Eigen::Index j = atom[k];
        if (j < 0 || j >= dicts.atom_count(static_cast<Eigen::Index>(k)))
            throw shape_error("atom " + std::to_string(j) + " out of range for dimension " + std::to_string(k));
        vectors.push_back(dicts.atoms[k].col(j));
    }
    return contract_full(measurement, vectors);
}

SparseSolution momp_solve(const SparseProblem &problem, const SolverConfig &config)
{
    problem.validate();
    config.validate();

    const Eigen::MatrixXcd &obs = problem.observation;
    SparseSolution sol;
    sol.coefficients = Eigen::MatrixXcd(0, obs.cols());
    sol.residual_norms.push_back(obs.norm());

    Eigen::MatrixXcd residual = obs;
    Eigen::MatrixXcd basis(obs.rows(), 0);

    for (Eigen::Index it = 0; it < config.sparsity; ++it)
    {
        Tensor projected = project_observation(residual, problem.measurement);
        std::optional<MultiIndex> tuple =
            select_support_tuple(projected, problem.measurement, problem.dictionaries, config, sol.support);
        if (!tuple)
            break;

        basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
        basis.col(basis.cols() - 1) = effective_column(problem.measurement, problem.dictionaries, *tuple);
        LeastSquaresFit fit = residual_update(obs, basis);

        const double prev = sol.residual_norms.back();
        const double cur = fit.residual.norm();
        if (config.stop_tol > 0.0)
        {
            const double rel = prev > 0.0 ? (prev - cur) / prev : 0.0;
            if (!(rel >= config.stop_tol))
            {
                basis.conservativeResize(Eigen::NoChange, basis.cols() - 1);
                break;
            }
        }

        sol.support.push_back(std::move(*tuple));
        sol.coefficients = std::move(fit.coefficients);
        sol.rank_deficient = sol.rank_deficient || fit.rank_deficient;
        residual = std::move(fit.residual);
        sol.residual_norms.push_back(cur);
    }
    return sol;
}

SparseSolution omp_solve(const Eigen::MatrixXcd &observation, const Eigen::MatrixXcd &flat_measurement,
                         const Eigen::MatrixXcd &flat_dictionary, const SolverConfig &config)
{
    config.validate();
    if (flat_measurement.rows() != observation.rows())
        throw shape_error("flat measurement has " + std::to_string(flat_measurement.rows()) +
                          " rows but the observation has " + std::to_string(observation.rows()));
    if (flat_dictionary.rows() != flat_measurement.cols())
        throw shape_error("flat dictionary has " + std::to_string(flat_dictionary.rows()) +
                          " rows but the flat measurement has " + std::to_string(flat_measurement.cols()) +
                          " columns");

    const Eigen::MatrixXcd effective = flat_measurement * flat_dictionary; // N^q x N^a
    const Eigen::VectorXd den = effective.colwise().squaredNorm();
    const Eigen::Index n_atoms = effective.cols();

    SparseSolution sol;
    sol.coefficients = Eigen::MatrixXcd(0, observation.cols());
    sol.residual_norms.push_back(observation.norm());

    Eigen::MatrixXcd residual = observation;
    Eigen::MatrixXcd basis(observation.rows(), 0);

    for (Eigen::Index it = 0; it < config.sparsity; ++it)
    {
        const Eigen::MatrixXcd proj = residual.adjoint() * flat_measurement; // N^m x N^s
        const Eigen::VectorXd num = (proj * flat_dictionary).colwise().squaredNorm();

        // Valid atoms sorted by score descending, index ascending on ties; the
        // rank walks past atoms already in the support.
        std::vector<Eigen::Index> order;
        order.reserve(static_cast<std::size_t>(n_atoms));
        for (Eigen::Index j = 0; j < n_atoms; ++j)
            if (den[j] != 0.0)
                order.push_back(j);
        if (order.empty())
            throw degenerate_problem_error("every flattened atom has zero measurement energy");
        std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            const double sa = num[a] / den[a], sb = num[b] / den[b];
            if (sa != sb)
                return sa > sb;
            return a < b;
        });
        std::optional<Eigen::Index> picked;
        for (Eigen::Index j : order)
        {
            if (std::find(sol.support.begin(), sol.support.end(), MultiIndex{j}) == sol.support.end())
            {
                picked = j;
                break;
            }
        }
        if (!picked)
            break;

        basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
        basis.col(basis.cols() - 1) = effective.col(*picked);
        LeastSquaresFit fit = residual_update(observation, basis);

        const double prev = sol.residual_norms.back();
        const double cur = fit.residual.norm();
        if (config.stop_tol > 0.0)
        {
            const double rel = prev > 0.0 ? (prev - cur) / prev : 0.0;
            if (!(rel >= config.stop_tol))
            {
                basis.conservativeResize(Eigen::NoChange, basis.cols() - 1);
                break;
            }
        }

        sol.support.push_back(MultiIndex{*picked});
        sol.coefficients = std::move(fit.coefficients);
        sol.rank_deficient = sol.rank_deficient || fit.rank_deficient;
        residual = std::move(fit.residual);
        sol.residual_norms.push_back(cur);
    }
    return sol;
}

} // namespace mompkit
