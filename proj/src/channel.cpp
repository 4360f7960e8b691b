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

#include "mompkit/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "mompkit/rng.hpp"

namespace mompkit
{

static constexpr double pi = 3.141592653589793238462643383279502884;

Eigen::VectorXcd steering_axis(Eigen::Index n_elements, double spatial_freq)
{
    if (n_elements < 1)
        throw shape_error("steering factor needs at least one element");
    Eigen::VectorXcd v(n_elements);
    for (Eigen::Index n = 0; n < n_elements; ++n)
        v[n] = std::polar(1.0, -pi * static_cast<double>(n) * spatial_freq);
    return v;
}

Eigen::VectorXcd steering(const ArrayGeometry &geom, const Eigen::Vector3d &direction)
{
    if (std::abs(direction.norm() - 1.0) > 1e-9)
        throw shape_error("steering direction must be a unit vector");
    const Eigen::VectorXcd ax = steering_axis(geom.nx, direction.x());
    const Eigen::VectorXcd ay = steering_axis(geom.ny, direction.y());
    Eigen::VectorXcd v(geom.size());
    for (Eigen::Index a = 0; a < geom.nx; ++a)
        v.segment(a * geom.ny, geom.ny) = ax[a] * ay;
    return v;
}

static double sinc(double x)
{
    if (x == 0.0)
        return 1.0;
    return std::sin(pi * x) / (pi * x);
}

Eigen::VectorXcd time_response(double delta_s, Eigen::Index taps, double sampling_time_s)
{
    if (taps < 1)
        throw shape_error("time response needs at least one tap");
    if (!(sampling_time_s > 0.0))
        throw shape_error("sampling time must be positive");
    Eigen::VectorXcd v(taps);
    for (Eigen::Index d = 0; d < taps; ++d)
        v[d] = sinc((static_cast<double>(d) * sampling_time_s - delta_s) / sampling_time_s);
    return v;
}

std::vector<Eigen::MatrixXcd> channel_taps(const std::vector<PathParams> &paths, const ArrayGeometry &tx,
                                           const ArrayGeometry &rx, Eigen::Index taps, double sampling_time_s,
                                           double tau0_s, bool *truncated)
{
    if (truncated)
        *truncated = false;
    std::vector<Eigen::MatrixXcd> h(static_cast<std::size_t>(taps),
                                    Eigen::MatrixXcd::Zero(rx.size(), tx.size()));
    const double window = static_cast<double>(taps) * sampling_time_s;
    for (const PathParams &p : paths)
    {
        const double delta = p.delay_s - tau0_s;
        if (truncated && (delta < 0.0 || delta >= window))
            *truncated = true;
        const Eigen::VectorXcd ar = steering(rx, p.doa);
        const Eigen::VectorXcd at = steering(tx, p.dod);
        const Eigen::VectorXcd pulse = time_response(delta, taps, sampling_time_s);
        const Eigen::MatrixXcd outer = p.gain * (ar * at.adjoint());
        for (Eigen::Index d = 0; d < taps; ++d)
            h[static_cast<std::size_t>(d)] += pulse[d] * outer;
    }
    return h;
}

static Eigen::MatrixXcd dft_matrix(Eigen::Index n)
{
    Eigen::MatrixXcd f(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
            f(r, c) = std::polar(1.0, -2.0 * pi * static_cast<double>(r) * static_cast<double>(c) /
                                          static_cast<double>(n));
    return f;
}

static Eigen::MatrixXcd kron2(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b)
{
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    return out;
}

TrainingSet build_training_dft(const ArrayGeometry &tx, const ArrayGeometry &rx, Eigen::Index rx_chains,
                               Eigen::Index symbols, Eigen::Index taps, const TrainingOptions &options)
{
    if (rx_chains < 1 || rx.size() % rx_chains != 0)
        throw config_error("receive chain count " + std::to_string(rx_chains) +
                           " must divide the receive array size " + std::to_string(rx.size()));
    if (symbols < 1 || taps < 1)
        throw config_error("training needs at least one symbol and one tap");
    const Eigen::Index active = options.pilot_active < 0 ? symbols : options.pilot_active;
    if (active > symbols)
        throw config_error("active pilot length " + std::to_string(active) + " exceeds the frame length " +
                           std::to_string(symbols));
    if (!(options.sampling_time_s > 0.0) || !(options.transmit_power_w > 0.0) || options.noise_variance_w < 0.0)
        throw config_error("training needs positive sampling time and power, non-negative noise variance");

    const Eigen::MatrixXcd dft_tx = kron2(dft_matrix(tx.nx), dft_matrix(tx.ny));
    const Eigen::MatrixXcd dft_rx = kron2(dft_matrix(rx.nx), dft_matrix(rx.ny));
    const Eigen::Index blocks = rx.size() / rx_chains;

    Eigen::MatrixXcd pilot = Eigen::MatrixXcd::Zero(1, symbols + taps);
    pilot.block(0, taps, 1, active).setOnes();

    TrainingSet set;
    set.tx = tx;
    set.rx = rx;
    set.symbols = symbols;
    set.taps = taps;
    set.sampling_time_s = options.sampling_time_s;
    set.transmit_power_w = options.transmit_power_w;
    set.noise_variance_w = options.noise_variance_w;
    set.frames.reserve(static_cast<std::size_t>(tx.size() * blocks));
    for (Eigen::Index f = 0; f < tx.size(); ++f)
        for (Eigen::Index b = 0; b < blocks; ++b)
        {
            TrainingFrame frame;
            frame.analog_precoder = dft_tx.col(f);
            frame.digital_precoder = Eigen::MatrixXcd::Identity(1, 1);
            frame.analog_combiner = dft_rx.middleCols(b * rx_chains, rx_chains);
            frame.digital_combiner = Eigen::MatrixXcd::Identity(rx_chains, rx_chains);
            frame.pilot = pilot;
            set.frames.push_back(std::move(frame));
        }
    return set;
}

std::vector<Eigen::MatrixXcd> synthesize_measurements(const std::vector<Eigen::MatrixXcd> &taps,
                                                      const TrainingSet &training, std::uint64_t seed)
{
    if (static_cast<Eigen::Index>(taps.size()) != training.taps)
        throw shape_error("channel provides " + std::to_string(taps.size()) + " delay taps but training expects " +
                          std::to_string(training.taps));
    if (training.frames.empty())
        throw shape_error("training set holds no frames");

    const Eigen::Index q_len = training.symbols;
    const Eigen::Index d_len = training.taps;
    const double amp = std::sqrt(training.transmit_power_w);
    const double noise_sd = std::sqrt(training.noise_variance_w / 2.0);

    std::vector<Eigen::MatrixXcd> out;
    out.reserve(training.frames.size());
    for (std::size_t m = 0; m < training.frames.size(); ++m)
    {
        const TrainingFrame &frame = training.frames[m];
        const Eigen::MatrixXcd w = frame.combiner();
        const Eigen::MatrixXcd f = frame.precoder();
        const Eigen::MatrixXcd &s = frame.pilot;
        if (s.cols() != q_len + d_len)
            throw shape_error("pilot of frame " + std::to_string(m) + " has " + std::to_string(s.cols()) +
                              " columns, expected " + std::to_string(q_len + d_len));
        if (taps[0].rows() != w.rows() || taps[0].cols() != f.rows())
            throw shape_error("channel taps of size " + std::to_string(taps[0].rows()) + "x" +
                              std::to_string(taps[0].cols()) + " do not match frame " + std::to_string(m));

        std::vector<Eigen::MatrixXcd> a(static_cast<std::size_t>(d_len));
        for (Eigen::Index d = 0; d < d_len; ++d)
            a[static_cast<std::size_t>(d)] = w.adjoint() * taps[static_cast<std::size_t>(d)] * f;

        Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(w.cols(), q_len);
        for (Eigen::Index q = 0; q < q_len; ++q)
            for (Eigen::Index d = 0; d < d_len; ++d)
                y.col(q).noalias() += a[static_cast<std::size_t>(d)] * s.col(q + d_len - 1 - d);
        y *= amp;

        if (noise_sd > 0.0)
        {
            std::mt19937_64 engine = make_engine(mix_seed(seed, static_cast<std::uint64_t>(m)));
            std::normal_distribution<double> gauss(0.0, noise_sd);
            Eigen::MatrixXcd noise(w.rows(), q_len);
            for (Eigen::Index q = 0; q < q_len; ++q)
                for (Eigen::Index r = 0; r < w.rows(); ++r)
                {
                    const double re = gauss(engine);
                    const double im = gauss(engine);
                    noise(r, q) = cxd(re, im);
                }
            y.noalias() += w.adjoint() * noise;
        }
        out.push_back(std::move(y));
    }
    return out;
}

WhitenedFrame whiten(const Eigen::MatrixXcd &observations, const Eigen::MatrixXcd &combiner)
{
    if (observations.rows() != combiner.cols())
        throw shape_error("observations have " + std::to_string(observations.rows()) +
                          " rows but the combiner has " + std::to_string(combiner.cols()) + " columns");
    const Eigen::MatrixXcd gram = combiner.adjoint() * combiner;
    Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw decomposition_error("combiner Gram matrix is not positive definite");
    WhitenedFrame out;
    out.observations = llt.matrixL().solve(observations);
    out.combiner = llt.matrixL().solve(combiner.adjoint()).adjoint();
    return out;
}

ChannelDictionaries build_dictionaries(double resolution, const ArrayGeometry &tx, const ArrayGeometry &rx,
                                       Eigen::Index taps, double sampling_time_s)
{
    if (!(resolution > 0.0))
        throw config_error("dictionary resolution must be positive");
    if (taps < 1 || !(sampling_time_s > 0.0))
        throw config_error("dictionaries need at least one tap and a positive sampling time");

    const auto atom_count = [resolution](Eigen::Index size) {
        const Eigen::Index n = static_cast<Eigen::Index>(std::floor(resolution * static_cast<double>(size)));
        if (n < 1)
            throw config_error("dictionary resolution too small for atom size " + std::to_string(size));
        return n;
    };

    const auto angular = [&](Eigen::Index size, bool conjugate, std::vector<double> &grid) {
        const Eigen::Index count = atom_count(size);
        grid.resize(static_cast<std::size_t>(count));
        Eigen::MatrixXcd psi(size, count);
        for (Eigen::Index t = 0; t < count; ++t)
        {
            const double g = -1.0 + 2.0 * static_cast<double>(t) / static_cast<double>(count);
            grid[static_cast<std::size_t>(t)] = g;
            Eigen::VectorXcd col = steering_axis(size, g);
            psi.col(t) = conjugate ? col.conjugate() : col;
        }
        return psi;
    };

    ChannelDictionaries out;
    out.set.atoms.resize(5);
    out.set.atoms[0] = angular(rx.nx, false, out.doa_x_grid);
    out.set.atoms[1] = angular(rx.ny, false, out.doa_y_grid);
    out.set.atoms[2] = angular(tx.nx, true, out.dod_x_grid);
    out.set.atoms[3] = angular(tx.ny, true, out.dod_y_grid);

    const Eigen::Index count = atom_count(taps);
    out.delay_grid.resize(static_cast<std::size_t>(count));
    Eigen::MatrixXcd psi(taps, count);
    const double window = static_cast<double>(taps) * sampling_time_s;
    for (Eigen::Index t = 0; t < count; ++t)
    {
        const double tau = static_cast<double>(t) * window / static_cast<double>(count);
        out.delay_grid[static_cast<std::size_t>(t)] = tau;
        psi.col(t) = time_response(tau, taps, sampling_time_s);
    }
    out.set.atoms[4] = psi;
    return out;
}

std::vector<Eigen::Index> MeasurementSet::tensor_shape() const
{
    return {rows(), rx.nx, rx.ny, tx.nx, tx.ny, taps};
}

cxd MeasurementSet::tensor_entry(Eigen::Index row, const MultiIndex &cell) const
{
    if (row < 0 || row >= rows())
        throw shape_error("tensor row " + std::to_string(row) + " out of range");
    if (cell.size() != 5)
        throw shape_error("tensor cell tuple must have five coordinates");
    const std::vector<Eigen::Index> shape = tensor_shape();
    for (std::size_t k = 0; k < 5; ++k)
        if (cell[k] < 0 || cell[k] >= shape[k + 1])
            throw shape_error("cell index " + std::to_string(cell[k]) + " out of bounds for dimension " +
                              std::to_string(k + 1));

    const Eigen::Index m = row / (rx_chains * symbols);
    const Eigen::Index r = (row / symbols) % rx_chains;
    const Eigen::Index q = row % symbols;
    const Eigen::MatrixXcd &w = combiners[static_cast<std::size_t>(m)];
    const Eigen::MatrixXcd &fs = pilot_conv[static_cast<std::size_t>(m)];
    return std::conj(w(cell[0] * rx.ny + cell[1], r)) * fs(cell[2] * tx.ny + cell[3], q + taps - 1 - cell[4]);
}

Tensor MeasurementSet::dense(Eigen::Index max_entries) const
{
    const std::vector<Eigen::Index> shape = tensor_shape();
    double entries = 1.0;
    for (Eigen::Index d : shape)
        entries *= static_cast<double>(d);
    if (entries > static_cast<double>(max_entries))
        throw resource_error("dense measurement tensor would hold " + std::to_string(entries) +
                             " entries, above the cap of " + std::to_string(max_entries));

    Tensor out(shape);
    cxd *dst = out.flat().data();
    const Eigen::Index n_rx = rx.size(), n_tx = tx.size();
    for (std::size_t m = 0; m < combiners.size(); ++m)
    {
        const Eigen::MatrixXcd &w = combiners[m];
        const Eigen::MatrixXcd &fs = pilot_conv[m];
        for (Eigen::Index r = 0; r < rx_chains; ++r)
            for (Eigen::Index q = 0; q < symbols; ++q)
                for (Eigen::Index ar = 0; ar < n_rx; ++ar)
                {
                    const cxd c = std::conj(w(ar, r));
                    for (Eigen::Index at = 0; at < n_tx; ++at)
                        for (Eigen::Index d = 0; d < taps; ++d)
                            *dst++ = c * fs(at, q + taps - 1 - d);
                }
    }
    return out;
}

MeasurementSet build_measurement_tensor(const TrainingSet &training, const std::vector<WhitenedFrame> &whitened)
{
    if (whitened.size() != training.frames.size())
        throw shape_error("got " + std::to_string(whitened.size()) + " whitened frames for " +
                          std::to_string(training.frames.size()) + " training frames");
    if (training.frames.empty())
        throw shape_error("training set holds no frames");

    MeasurementSet set;
    set.tx = training.tx;
    set.rx = training.rx;
    set.rx_chains = whitened[0].combiner.cols();
    set.symbols = training.symbols;
    set.taps = training.taps;
    if (whitened[0].combiner.rows() != set.rx.size())
        throw shape_error("combiner rows " + std::to_string(whitened[0].combiner.rows()) +
                          " do not match the receive array size " + std::to_string(set.rx.size()));
    if (training.frames[0].analog_precoder.rows() != set.tx.size())
        throw shape_error("precoder rows " + std::to_string(training.frames[0].analog_precoder.rows()) +
                          " do not match the transmit array size " + std::to_string(set.tx.size()));
    set.combiners.reserve(whitened.size());
    set.pilot_conv.reserve(whitened.size());
    set.observation.resize(static_cast<Eigen::Index>(whitened.size()) * set.rx_chains * set.symbols);

    for (std::size_t m = 0; m < whitened.size(); ++m)
    {
        const WhitenedFrame &frame = whitened[m];
        if (frame.observations.rows() != set.rx_chains || frame.observations.cols() != set.symbols)
            throw shape_error("whitened frame " + std::to_string(m) + " has observations of size " +
                              std::to_string(frame.observations.rows()) + "x" +
                              std::to_string(frame.observations.cols()));
        const Eigen::MatrixXcd fs = training.frames[m].precoder() * training.frames[m].pilot;
        set.combiners.push_back(frame.combiner);
        set.pilot_conv.push_back(fs);
        for (Eigen::Index r = 0; r < set.rx_chains; ++r)
            for (Eigen::Index q = 0; q < set.symbols; ++q)
                set.observation[static_cast<Eigen::Index>(m) * set.rx_chains * set.symbols + r * set.symbols + q] =
                    frame.observations(r, q);
    }
    return set;
}

std::vector<PathEstimate> extract_paths(const SparseSolution &solution, const ChannelDictionaries &dictionaries)
{
    if (solution.coefficients.cols() != 1 && !solution.support.empty())
        throw shape_error("path extraction expects a single-observation solution, got " +
                          std::to_string(solution.coefficients.cols()) + " columns");

    const auto lookup = [](const std::vector<double> &grid, Eigen::Index j, const char *axis) {
        if (j < 0 || j >= static_cast<Eigen::Index>(grid.size()))
            throw shape_error(std::string("support index out of range on the ") + axis + " grid");
        return grid[static_cast<std::size_t>(j)];
    };

    std::vector<PathEstimate> out;
    out.reserve(solution.support.size());
    for (std::size_t s = 0; s < solution.support.size(); ++s)
    {
        const MultiIndex &j = solution.support[s];
        if (j.size() != 5)
            throw shape_error("support tuple of length " + std::to_string(j.size()) +
                              " for a five-dimensional channel dictionary");
        PathEstimate p;
        const double doa_x = lookup(dictionaries.doa_x_grid, j[0], "arrival x");
        const double doa_y = lookup(dictionaries.doa_y_grid, j[1], "arrival y");
        const double dod_x = lookup(dictionaries.dod_x_grid, j[2], "departure x");
        const double dod_y = lookup(dictionaries.dod_y_grid, j[3], "departure y");
        p.relative_delay_s = lookup(dictionaries.delay_grid, j[4], "delay");

        // Positive-root completion back to a unit direction vector; slack at
        // the unit circle keeps exact boundary grid pairs valid.
        const double h_doa = doa_x * doa_x + doa_y * doa_y;
        const double h_dod = dod_x * dod_x + dod_y * dod_y;
        p.valid = h_doa <= 1.0 + 1e-12 && h_dod <= 1.0 + 1e-12;
        p.doa = Eigen::Vector3d(doa_x, doa_y, std::sqrt(std::max(0.0, 1.0 - h_doa)));
        p.dod = Eigen::Vector3d(dod_x, dod_y, std::sqrt(std::max(0.0, 1.0 - h_dod)));
        p.coefficient = solution.coefficients(static_cast<Eigen::Index>(s), 0);
        p.gain_mag = std::abs(p.coefficient);
        out.push_back(std::move(p));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const PathEstimate &a, const PathEstimate &b) { return a.gain_mag > b.gain_mag; });
    return out;
}

void write_path_file(const std::string &filename, const std::vector<PathParams> &paths)
{
    std::ofstream f(filename);
    if (!f)
        throw config_error("cannot open path file for writing: " + filename);
    f << "# re(gain) im(gain) doa_x doa_y doa_z dod_x dod_y dod_z delay_s\n";
    char buf[64];
    for (const PathParams &p : paths)
    {
        const double fields[9] = {p.gain.real(), p.gain.imag(), p.doa.x(), p.doa.y(), p.doa.z(),
                                  p.dod.x(),     p.dod.y(),     p.dod.z(), p.delay_s};
        for (int i = 0; i < 9; ++i)
        {
            std::snprintf(buf, sizeof(buf), "%.17g", fields[i]);
            f << buf << (i == 8 ? '\n' : ' ');
        }
    }
    if (!f)
        throw config_error("failed while writing path file: " + filename);
}

std::vector<PathParams> read_path_file(const std::string &filename)
{
    std::ifstream f(filename);
    if (!f)
        throw config_error("cannot open path file: " + filename);
    std::vector<PathParams> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(f, line))
    {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream iss(line);
        double v[9];
        if (!(iss >> v[0]))
            continue; // blank or comment-only line
        for (int i = 1; i < 9; ++i)
            if (!(iss >> v[i]))
                throw config_error("malformed path record at " + filename + ":" + std::to_string(line_no));
        double trailing;
        if (iss >> trailing)
            throw config_error("trailing fields in path record at " + filename + ":" + std::to_string(line_no));
        PathParams p;
        p.gain = cxd(v[0], v[1]);
        p.doa = Eigen::Vector3d(v[2], v[3], v[4]);
        p.dod = Eigen::Vector3d(v[5], v[6], v[7]);
        p.delay_s = v[8];
        out.push_back(p);
    }
    return out;
}

} // namespace mompkit
