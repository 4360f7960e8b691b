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

#ifndef MOMPKIT_CHANNEL_HPP
#define MOMPKIT_CHANNEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mompkit/paths.hpp"
#include "mompkit/solver.hpp"
#include "mompkit/tensor.hpp"

namespace mompkit
{

// Uniform rectangular array on a half-wavelength grid. Antenna (a, b) maps to
// element index a*ny + b, so the x axis varies slowest, matching the
// Kronecker order of the steering factors.
struct ArrayGeometry
{
    Eigen::Index nx = 1;
    Eigen::Index ny = 1;

    Eigen::Index size() const { return nx * ny; }
};

// Per-axis steering factor: entry n is exp(-j*pi*n*spatial_freq), n 0-based.
Eigen::VectorXcd steering_axis(Eigen::Index n_elements, double spatial_freq);

// Full array response for a unit direction vector (direction cosines); the
// Kronecker product of the x and y axis factors.
Eigen::VectorXcd steering(const ArrayGeometry &geom, const Eigen::Vector3d &direction);

// Sampled sinc pulse over `taps` delay taps: entry d is sinc((d*Ts - delta)/Ts).
Eigen::VectorXcd time_response(double delta_s, Eigen::Index taps, double sampling_time_s);

// Delay-tap channel matrices H_d (rx.size() x tx.size()) for the given paths,
// with the receive window starting at clock offset tau0. Paths whose delay
// relative to tau0 falls outside [0, taps*Ts) still contribute their pulse
// tails but set *truncated.
std::vector<Eigen::MatrixXcd> channel_taps(const std::vector<PathParams> &paths, const ArrayGeometry &tx,
                                           const ArrayGeometry &rx, Eigen::Index taps, double sampling_time_s,
                                           double tau0_s, bool *truncated = nullptr);

// Hybrid beamforming stages of one training frame. The effective precoder
// and combiner are the analog*digital products.
struct TrainingFrame
{
    Eigen::MatrixXcd analog_precoder;  // N_T x M_T
    Eigen::MatrixXcd digital_precoder; // M_T x M_T
    Eigen::MatrixXcd analog_combiner;  // N_R x M_R
    Eigen::MatrixXcd digital_combiner; // M_R x M_R
    Eigen::MatrixXcd pilot;            // M_T x (Q + D), first D columns zero

    Eigen::MatrixXcd precoder() const { return analog_precoder * digital_precoder; }
    Eigen::MatrixXcd combiner() const { return analog_combiner * digital_combiner; }
};

struct TrainingSet
{
    std::vector<TrainingFrame> frames;
    ArrayGeometry tx, rx;
    Eigen::Index symbols = 0; // Q, received symbols per frame
    Eigen::Index taps = 0;    // D, delay taps spanned by the pilot head
    double sampling_time_s = 0.0;
    double transmit_power_w = 0.0;
    double noise_variance_w = 0.0; // per receive antenna, before combining
};

// Options for build_training_dft beyond the array/frame structure.
struct TrainingOptions
{
    double sampling_time_s = 0.5e-9;
    double transmit_power_w = 0.1;    // 20 dBm
    double noise_variance_w = 7.943282347242789e-12; // -81 dBm
    Eigen::Index pilot_active = -1;   // active pilot symbols; -1 = all Q
};

// DFT-based training: transmit precoders are the columns of
// DFT(tx.nx) kron DFT(tx.ny); receive combiners are the consecutive
// rx_chains-column blocks of DFT(rx.nx) kron DFT(rx.ny). One frame per
// (precoder, block) pair, precoder-major, with identity digital stages and a
// shared pilot of `taps` leading zeros, `pilot_active` ones and trailing
// zeros. DFT entries keep unit modulus (no normalization).
TrainingSet build_training_dft(const ArrayGeometry &tx, const ArrayGeometry &rx, Eigen::Index rx_chains,
                               Eigen::Index symbols, Eigen::Index taps, const TrainingOptions &options = {});

// Received symbols per frame: Y_m = sqrt(P_t) sum_d W_m^H H_d F_m S_m(shifted)
// plus combined noise, noise drawn i.i.d. CN(0, sigma^2) per receive antenna
// from a per-frame substream of `seed`.
std::vector<Eigen::MatrixXcd> synthesize_measurements(const std::vector<Eigen::MatrixXcd> &taps,
                                                      const TrainingSet &training, std::uint64_t seed);

struct WhitenedFrame
{
    Eigen::MatrixXcd observations; // M_R x Q
    Eigen::MatrixXcd combiner;     // N_R x M_R
};

// Noise whitening of one frame: with L L^H = W^H W, returns L^{-1} Y and
// W L^{-H}, whose combined columns are orthonormal. A failed Cholesky
// factorization throws decomposition_error.
WhitenedFrame whiten(const Eigen::MatrixXcd &observations, const Eigen::MatrixXcd &combiner);

// Per-dimension dictionaries for the channel problem plus the grids they were
// sampled from. Dimensions are (rx x, rx y, tx x, tx y, delay). Angular grids
// are uniform in direction cosine over [-1, 1); the transmit-side factors are
// conjugated so the dictionaries match the adjoint of the transmit steering
// in the channel model. The delay grid is uniform over [0, taps*Ts).
struct ChannelDictionaries
{
    DictionarySet set;
    std::vector<double> doa_x_grid, doa_y_grid;
    std::vector<double> dod_x_grid, dod_y_grid;
    std::vector<double> delay_grid;
};

// Atom counts are floor(resolution * atom size) per dimension.
ChannelDictionaries build_dictionaries(double resolution, const ArrayGeometry &tx, const ArrayGeometry &rx,
                                       Eigen::Index taps, double sampling_time_s);

// Measurement tensor and stacked observation in factored per-frame form.
// Row (m, m_R, q) maps to flat row m*M_R*Q + m_R*Q + q; the tensor cell
// (i1, i2, i3, i4, i5) over (rx x, rx y, tx x, tx y, delay) has entry
// conj(W'_m[i1*rx.ny+i2, m_R]) * (F_m S_m)[i3*tx.ny+i4, q+D-1-i5].
// The sqrt(P_t) pilot scaling is deliberately not part of the tensor, so
// recovered coefficients carry a sqrt(P_t) factor.
struct MeasurementSet
{
    Eigen::VectorXcd observation;               // length M*M_R*Q
    std::vector<Eigen::MatrixXcd> combiners;    // whitened W'_m, N_R x M_R
    std::vector<Eigen::MatrixXcd> pilot_conv;   // F_m S_m, N_T x (Q+D)
    ArrayGeometry tx, rx;
    Eigen::Index rx_chains = 0; // M_R
    Eigen::Index symbols = 0;   // Q
    Eigen::Index taps = 0;      // D

    Eigen::Index rows() const
    {
        return static_cast<Eigen::Index>(combiners.size()) * rx_chains * symbols;
    }
    std::vector<Eigen::Index> tensor_shape() const;

    // Single tensor entry, computed from the factored form.
    cxd tensor_entry(Eigen::Index row, const MultiIndex &cell) const;

    // Materializes the dense tensor; throws resource_error above the cap.
    Tensor dense(Eigen::Index max_entries = kron_entry_cap) const;
};

MeasurementSet build_measurement_tensor(const TrainingSet &training, const std::vector<WhitenedFrame> &whitened);

// Grid parameters of each support tuple of a single-observation solution,
// sorted by coefficient magnitude descending. Direction z components carry
// the positive completion root; horizontal components outside the unit circle
// mark the estimate invalid.
std::vector<PathEstimate> extract_paths(const SparseSolution &solution, const ChannelDictionaries &dictionaries);

// Line-oriented path ground-truth files: one path per line with fields
// re(gain) im(gain) doa_x doa_y doa_z dod_x dod_y dod_z delay_seconds,
// '#' comments and blank lines skipped.
void write_path_file(const std::string &filename, const std::vector<PathParams> &paths);
std::vector<PathParams> read_path_file(const std::string &filename);

} // namespace mompkit

#endif
