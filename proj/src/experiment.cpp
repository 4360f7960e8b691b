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

#include "mompkit/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

#include "mompkit/metrics.hpp"
#include "mompkit/rng.hpp"

namespace mompkit
{

namespace
{

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_short(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

// RFC 4180 quoting; our numeric fields never need it but keep it general.
std::string csv_field(const std::string &s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_csv(const std::filesystem::path &file, const std::vector<std::string> &header,
               const std::vector<std::vector<std::string>> &rows)
{
    std::ofstream f(file);
    if (!f)
        throw config_error("cannot open output file: " + file.string());
    for (std::size_t c = 0; c < header.size(); ++c)
        f << csv_field(header[c]) << (c + 1 < header.size() ? "," : "\n");
    for (const auto &row : rows)
        for (std::size_t c = 0; c < row.size(); ++c)
            f << csv_field(row[c]) << (c + 1 < row.size() ? "," : "\n");
    if (!f)
        throw config_error("failed while writing " + file.string());
}

std::string sanitize(std::string s)
{
    for (char &c : s)
    {
        if (c == '.')
            c = 'd';
        else if (c == '-')
            c = 'm';
        else if (c == '+')
            c = 'p';
    }
    return s;
}

// Flat atom index -> per-dimension tuple, last dimension fastest (the
// kron_flatten column order).
MultiIndex decompose_flat_atom(Eigen::Index flat, const DictionarySet &dicts)
{
    MultiIndex tuple(static_cast<std::size_t>(dicts.n_dims()));
    for (Eigen::Index k = dicts.n_dims() - 1; k >= 0; --k)
    {
        tuple[static_cast<std::size_t>(k)] = flat % dicts.atom_count(k);
        flat /= dicts.atom_count(k);
    }
    return tuple;
}

Eigen::VectorXcd kron2v(const Eigen::VectorXcd &a, const Eigen::VectorXcd &b)
{
    Eigen::VectorXcd out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a[i] * b;
    return out;
}

// Channel estimate rebuilt from the selected atoms: each support tuple
// contributes gain * (rx atom) (tx atom)^T weighted by its delay atom, with the
// sqrt(P_t) scaling divided back out of the recovered coefficient. The
// transmit atoms are already conjugated, matching the channel model directly.
std::vector<Eigen::MatrixXcd> reconstruct_taps(const SparseSolution &sol, const ChannelDictionaries &dicts,
                                               const ArrayGeometry &tx, const ArrayGeometry &rx,
                                               Eigen::Index taps, double sqrt_power)
{
    std::vector<Eigen::MatrixXcd> out(static_cast<std::size_t>(taps),
                                      Eigen::MatrixXcd::Zero(rx.size(), tx.size()));
    for (std::size_t p = 0; p < sol.support.size(); ++p)
    {
        const MultiIndex &t = sol.support[p];
        const cxd gain = sol.coefficients(static_cast<Eigen::Index>(p), 0) / sqrt_power;
        const Eigen::VectorXcd a_rx = kron2v(dicts.set.atoms[0].col(t[0]), dicts.set.atoms[1].col(t[1]));
        const Eigen::VectorXcd a_tx = kron2v(dicts.set.atoms[2].col(t[2]), dicts.set.atoms[3].col(t[3]));
        const Eigen::MatrixXcd outer = a_rx * a_tx.transpose();
        const Eigen::VectorXcd &delay_atom = dicts.set.atoms[4].col(t[4]);
        for (Eigen::Index d = 0; d < taps; ++d)
            out[static_cast<std::size_t>(d)] += gain * delay_atom[d] * outer;
    }
    return out;
}

std::string percentile_or_nan(const std::vector<double> &finite, double p)
{
    if (finite.empty())
        return "nan";
    return fmt(percentile(finite, p));
}

std::vector<double> finite_only(const std::vector<double> &v)
{
    std::vector<double> out;
    out.reserve(v.size());
    for (double x : v)
        if (std::isfinite(x))
            out.push_back(x);
    return out;
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig &config, std::ostream &log)
{
    config.validate();
    namespace fs = std::filesystem;
    const fs::path out_dir(config.output_dir);
    fs::create_directories(out_dir);

    ExperimentResult result;

    const bool paths_mode = !config.paths_file.empty();
    std::vector<PathParams> file_paths;
    if (paths_mode)
    {
        file_paths = read_path_file(config.paths_file);
        if (file_paths.empty())
            throw config_error("path file holds no paths: " + config.paths_file);
    }
    const std::vector<Eigen::Vector3d> positions =
        paths_mode ? std::vector<Eigen::Vector3d>{config.paths_user} : config.resolved_positions();

    const std::vector<double> k_list = config.sweep_k_res.empty() ? std::vector<double>{config.k_res}
                                                                  : config.sweep_k_res;
    const std::vector<double> p_list = config.sweep_power_dbm.empty() ? std::vector<double>{config.power_dbm}
                                                                      : config.sweep_power_dbm;
    const Eigen::Index all_frames = config.tx.size() * (config.rx.size() / config.rx_chains);
    const std::vector<Eigen::Index> f_list =
        config.sweep_frames.empty() ? std::vector<Eigen::Index>{all_frames} : config.sweep_frames;

    const double ts = config.sampling_time_s();
    Eigen::Index sweep_idx = 0;

    std::vector<std::vector<std::string>> summary_rows;

    for (double k_res : k_list)
        for (double power_dbm : p_list)
            for (Eigen::Index frames : f_list)
            {
                if (frames > all_frames)
                    throw config_error("sweep frame count " + std::to_string(frames) + " exceeds the " +
                                       std::to_string(all_frames) + " training frames");

                char tag_buf[96];
                std::snprintf(tag_buf, sizeof(tag_buf), "s%02d_k%s_p%s_f%d", static_cast<int>(sweep_idx),
                              sanitize(fmt_short(k_res)).c_str(), sanitize(fmt_short(power_dbm)).c_str(),
                              static_cast<int>(frames));
                SweepPoint sp;
                sp.tag = tag_buf;
                sp.k_res = k_res;
                sp.power_dbm = power_dbm;
                sp.frames = frames;

                const double power_w = std::pow(10.0, (power_dbm - 30.0) / 10.0);
                const double sqrt_power = std::sqrt(power_w);
                const ChannelDictionaries dicts =
                    build_dictionaries(k_res, config.tx, config.rx, config.taps, ts);

                // Feasibility of the flattened baseline, decided once per sweep.
                bool omp_enabled = config.omp_baseline != "off";
                if (omp_enabled)
                {
                    double flat_entries = 1.0, atom_total = 1.0;
                    for (const Eigen::MatrixXcd &a : dicts.set.atoms)
                    {
                        flat_entries *= static_cast<double>(a.rows()) * static_cast<double>(a.cols());
                        atom_total *= static_cast<double>(a.cols());
                    }
                    const double gram_entries =
                        static_cast<double>(frames * config.rx_chains * config.symbols) * atom_total;
                    if (flat_entries > static_cast<double>(kron_entry_cap) ||
                        gram_entries > static_cast<double>(kron_entry_cap))
                    {
                        if (config.omp_baseline == "on")
                            throw resource_error("flattened baseline above the materialization cap at sweep " +
                                                 sp.tag);
                        omp_enabled = false;
                        log << "notice: flattened baseline disabled at sweep " << sp.tag
                            << " (above the materialization cap)\n";
                    }
                }
                Eigen::MatrixXcd flat_psi;
                if (omp_enabled)
                    flat_psi = kron_flatten(dicts.set.atoms);

                TrainingOptions topt;
                topt.sampling_time_s = ts;
                topt.transmit_power_w = power_w;
                topt.noise_variance_w = config.noise_variance_w();
                topt.pilot_active = config.pilot_active;
                TrainingSet training =
                    build_training_dft(config.tx, config.rx, config.rx_chains, config.symbols, config.taps, topt);
                if (frames < all_frames)
                    training.frames.resize(static_cast<std::size_t>(frames));

                for (std::size_t pos_idx = 0; pos_idx < positions.size(); ++pos_idx)
                {
                    const Eigen::Vector3d user = positions[pos_idx];
                    const std::uint64_t pos_seed =
                        mix_seed(mix_seed(config.seed, static_cast<std::uint64_t>(sweep_idx)),
                                 static_cast<std::uint64_t>(pos_idx));

                    std::vector<PathParams> truth;
                    double tau0;
                    if (paths_mode)
                    {
                        truth = file_paths;
                        tau0 = config.paths_tau0_s;
                    }
                    else
                    {
                        TraceOptions topts;
                        topts.reflection_loss_db = config.reflection_loss_db;
                        topts.wavelength_m = config.wavelength_m();
                        topts.second_order = config.second_order;
                        truth = trace_paths(config.room, {config.anchor, user}, topts);
                        tau0 = config.tau0_mode == "fixed" ? config.tau0_s : truth[0].delay_s;
                    }
                    std::vector<PathParams> truth_sorted = truth;
                    std::stable_sort(truth_sorted.begin(), truth_sorted.end(),
                                     [](const PathParams &a, const PathParams &b) {
                                         return std::abs(a.gain) > std::abs(b.gain);
                                     });

                    bool truncated = false;
                    const std::vector<Eigen::MatrixXcd> true_taps =
                        channel_taps(truth, config.tx, config.rx, config.taps, ts, tau0, &truncated);
                    if (truncated)
                        log << "notice: path delays truncated by the receive window at position "
                            << pos_idx << "\n";

                    const std::vector<Eigen::MatrixXcd> received =
                        synthesize_measurements(true_taps, training, pos_seed);
                    std::vector<WhitenedFrame> whitened;
                    whitened.reserve(received.size());
                    for (std::size_t m = 0; m < received.size(); ++m)
                        whitened.push_back(whiten(received[m], training.frames[m].combiner()));
                    const MeasurementSet ms = build_measurement_tensor(training, whitened);

                    SparseProblem problem;
                    problem.observation = ms.observation;
                    problem.measurement = ms.dense();
                    problem.dictionaries = dicts.set;

                    SolverConfig scfg;
                    scfg.sparsity = config.sparsity;
                    scfg.refinement_sweeps = config.refinement_sweeps;
                    scfg.init_mode = config.init_mode;
                    scfg.coarse_init_factor = config.coarse_init_factor;
                    scfg.stop_tol = config.stop_tol;

                    const auto t0 = std::chrono::steady_clock::now();
                    const SparseSolution sol = momp_solve(problem, scfg);
                    const auto t1 = std::chrono::steady_clock::now();
                    const std::vector<PathEstimate> est = extract_paths(sol, dicts);

                    MetricsRow row;
                    row.position_id = static_cast<Eigen::Index>(pos_idx);
                    row.true_user = user;
                    row.solve_time_s = std::chrono::duration<double>(t1 - t0).count();

                    const PathParams &main_true = truth_sorted[0];
                    row.doa_error_rad = est.empty() ? nan_v : metric_doa_error(main_true.doa, est[0].doa);
                    row.dod_error_rad = est.empty() ? nan_v : metric_doa_error(main_true.dod, est[0].dod);

                    const std::vector<Eigen::MatrixXcd> est_taps =
                        reconstruct_taps(sol, dicts, config.tx, config.rx, config.taps, sqrt_power);
                    row.nmse_db = metric_nmse_db(true_taps, est_taps);

                    if (truth_sorted.size() >= 2)
                    {
                        std::vector<double> est_delays;
                        est_delays.reserve(est.size());
                        for (const PathEstimate &e : est)
                            est_delays.push_back(e.relative_delay_s);
                        row.delay2_error_s = metric_secondary_delay_error(truth_sorted[1].delay_s,
                                                                          main_true.delay_s, est_delays);
                    }
                    else
                        row.delay2_error_s = nan_v;

                    const LocationFix fix = localize(est, config.anchor, config.thresholds);
                    row.detected = fix.status == FixStatus::located;
                    row.tau0_est_s = fix.clock_offset_s;
                    row.n_wall = fix.n_wall;
                    row.n_floor_ceiling = fix.n_floor_ceiling;
                    row.n_spurious = fix.n_spurious;
                    row.loc_error_m = row.detected ? (fix.position - user).norm() : nan_v;

                    if (omp_enabled)
                    {
                        const Eigen::Index cells = problem.measurement.size() / problem.measurement.dim(0);
                        const Eigen::Map<const Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
                            flat_phi(problem.measurement.flat().data(), problem.measurement.dim(0), cells);
                        const auto o0 = std::chrono::steady_clock::now();
                        const SparseSolution omp_sol =
                            omp_solve(problem.observation, flat_phi, flat_psi, scfg);
                        const auto o1 = std::chrono::steady_clock::now();
                        row.omp_time_s = std::chrono::duration<double>(o1 - o0).count();
                        SparseSolution tupled = omp_sol;
                        tupled.support.clear();
                        for (const MultiIndex &flat : omp_sol.support)
                            tupled.support.push_back(decompose_flat_atom(flat[0], dicts.set));
                        const std::vector<PathEstimate> omp_est = extract_paths(tupled, dicts);
                        row.omp_ran = true;
                        row.omp_doa_error_rad =
                            omp_est.empty() ? nan_v : metric_doa_error(main_true.doa, omp_est[0].doa);
                    }
                    else
                    {
                        row.omp_ran = false;
                        row.omp_doa_error_rad = nan_v;
                        row.omp_time_s = nan_v;
                    }

                    sp.rows.push_back(row);
                    sp.fixes.push_back(fix);
                }

                // Per-sweep CSV files; timing lives apart so the metric and fix
                // files are reproducible byte for byte.
                {
                    std::vector<std::vector<std::string>> rows;
                    for (const MetricsRow &r : sp.rows)
                        rows.push_back({std::to_string(r.position_id), fmt(r.true_user.x()), fmt(r.true_user.y()),
                                        fmt(r.true_user.z()), fmt(r.doa_error_rad), fmt(r.dod_error_rad),
                                        fmt(r.nmse_db), fmt(r.delay2_error_s), fmt(r.loc_error_m),
                                        r.detected ? "1" : "0", fmt(r.tau0_est_s), std::to_string(r.n_wall),
                                        std::to_string(r.n_floor_ceiling), std::to_string(r.n_spurious),
                                        r.omp_ran ? "1" : "0", fmt(r.omp_doa_error_rad)});
                    const std::string name = "metrics_" + sp.tag + ".csv";
                    write_csv(out_dir / name,
                              {"position_id", "true_x", "true_y", "true_z", "doa_error_rad", "dod_error_rad",
                               "nmse_db", "delay2_error_s", "loc_error_m", "detected", "tau0_est_s", "n_wall",
                               "n_floorceil", "n_spurious", "omp_ran", "omp_doa_error_rad"},
                              rows);
                    result.files.push_back(name);
                }
                {
                    std::vector<std::vector<std::string>> rows;
                    for (std::size_t i = 0; i < sp.fixes.size(); ++i)
                    {
                        const LocationFix &fx = sp.fixes[i];
                        const Eigen::Vector3d &tu = sp.rows[i].true_user;
                        rows.push_back({fmt(tu.x()), fmt(tu.y()), fmt(tu.z()), fmt(fx.position.x()),
                                        fmt(fx.position.y()), fmt(fx.position.z()), fmt(fx.clock_offset_s),
                                        fx.status == FixStatus::located ? "located" : "no_detection",
                                        std::to_string(fx.n_wall), std::to_string(fx.n_floor_ceiling),
                                        std::to_string(fx.n_spurious)});
                    }
                    const std::string name = "fixes_" + sp.tag + ".csv";
                    write_csv(out_dir / name,
                              {"true_x", "true_y", "true_z", "est_x", "est_y", "est_z", "tau0_est_s", "status",
                               "n_wall", "n_floorceil", "n_spurious"},
                              rows);
                    result.files.push_back(name);
                }
                {
                    std::vector<std::vector<std::string>> rows;
                    for (const MetricsRow &r : sp.rows)
                        rows.push_back(
                            {std::to_string(r.position_id), fmt(r.solve_time_s), fmt(r.omp_time_s)});
                    const std::string name = "timing_" + sp.tag + ".csv";
                    write_csv(out_dir / name, {"position_id", "solve_time_s", "omp_time_s"}, rows);
                    result.files.push_back(name);
                }

                // Percentile summary over the finite samples of each metric.
                {
                    std::vector<double> doa, dod, nmse, del2, loc;
                    Eigen::Index detected = 0;
                    for (const MetricsRow &r : sp.rows)
                    {
                        doa.push_back(r.doa_error_rad);
                        dod.push_back(r.dod_error_rad);
                        nmse.push_back(r.nmse_db);
                        del2.push_back(r.delay2_error_s);
                        loc.push_back(r.loc_error_m);
                        if (r.detected)
                            ++detected;
                    }
                    std::vector<std::string> srow = {
                        sp.tag, fmt_short(sp.k_res), fmt_short(sp.power_dbm), std::to_string(sp.frames),
                        std::to_string(sp.rows.size()),
                        fmt(sp.rows.empty() ? nan_v
                                            : static_cast<double>(detected) / static_cast<double>(sp.rows.size()))};
                    for (const std::vector<double> *metric : {&doa, &dod, &nmse, &del2, &loc})
                    {
                        const std::vector<double> finite = finite_only(*metric);
                        for (double p : {10.0, 25.0, 50.0, 75.0, 90.0})
                            srow.push_back(percentile_or_nan(finite, p));
                    }
                    summary_rows.push_back(std::move(srow));
                }

                result.sweeps.push_back(std::move(sp));
                ++sweep_idx;
            }

    std::vector<std::string> header = {"tag", "k_res", "power_dbm", "frames", "positions", "detection_rate"};
    for (const char *m : {"doa_error_rad", "dod_error_rad", "nmse_db", "delay2_error_s", "loc_error_m"})
        for (const char *p : {"p10", "p25", "p50", "p75", "p90"})
            header.push_back(std::string(m) + "_" + p);
    write_csv(out_dir / "summary.csv", header, summary_rows);
    result.files.push_back("summary.csv");
    return result;
}

} // namespace mompkit
