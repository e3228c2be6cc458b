// SPDX-License-Identifier: Apache-2.0
//
// nfmm - localization error bounds under near-field / wideband channel model mismatch
// Copyright (C) 2026 the nfmm authors
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

#pragma once

#include <cstdint>
#include <iostream>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "nfmm/channel.hpp"
#include "nfmm/params.hpp"
#include "nfmm/scenario.hpp"

namespace nfmm
{

enum class CombinerMode
{
    digital, // M = N, W_g = I
    analog   // M = 1, random unit-modulus phases / sqrt(N)
};

/// One unitary combining matrix per transmission (W_g^H W_g = I_M).
struct CombinerSet
{
    std::vector<Eigen::MatrixXcd> w; // N x M each, g = 0..G-1
    CombinerMode mode = CombinerMode::digital;

    int n_transmissions() const { return static_cast<int>(w.size()); }
    int n_outputs() const { return w.empty() ? 0 : static_cast<int>(w.front().cols()); }
};

/// Pilot symbols x_{g,k}; |x|^2 = P. Fixed to sqrt(P) (zero phase): the
/// pilot phase is indistinguishable from the gain phase xi.
struct PilotSet
{
    Eigen::MatrixXcd symbols; // G x K
};

inline PilotSet make_pilots(const ScenarioConfig& cfg)
{
    PilotSet p;
    p.symbols = Eigen::MatrixXcd::Constant(cfg.n_transmissions, cfg.n_subcarriers,
                                           cd(std::sqrt(cfg.tx_power_w), 0.0));
    return p;
}

/// [0, 1) double from the top 53 bits of a 64-bit draw. Keeps the generated
/// streams identical across standard libraries.
inline double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// One circularly-symmetric complex Gaussian with variance `var` per complex
/// sample (Box-Muller on two uniforms).
inline cd complex_gaussian(std::mt19937_64& rng, double var)
{
    const double u1 = 1.0 - uniform01(rng); // (0, 1]
    const double u2 = uniform01(rng);
    const double mag = std::sqrt(-2.0 * std::log(u1)) * std::sqrt(var / 2.0);
    return {mag * std::cos(2.0 * M_PI * u2), mag * std::sin(2.0 * M_PI * u2)};
}

/// sigma_n^2 = N_0 * W * 10^(N_f / 10), in watts.
inline double noise_variance(const ScenarioConfig& cfg) { return cfg.noise_variance_w(); }

inline CombinerSet make_combiners(const ScenarioConfig& cfg, CombinerMode mode, std::uint64_t seed)
{
    CombinerSet set;
    set.mode = mode;
    set.w.resize(cfg.n_transmissions);
    if (mode == CombinerMode::digital)
    {
        if (cfg.n_rfc != cfg.n_antennas)
            throw std::invalid_argument("digital mode requires n_rfc == n_antennas");
        for (auto& w : set.w)
            w = Eigen::MatrixXcd::Identity(cfg.n_antennas, cfg.n_antennas);
    }
    else
    {
        if (cfg.n_rfc != 1)
            throw std::invalid_argument("analog mode requires n_rfc == 1");
        std::mt19937_64 rng(seed);
        const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.n_antennas));
        for (auto& w : set.w)
        {
            w.resize(cfg.n_antennas, 1);
            for (int n = 0; n < cfg.n_antennas; ++n)
            {
                const double phi = 2.0 * M_PI * uniform01(rng);
                w(n, 0) = scale * std::exp(cj * phi);
            }
        }
    }
    return set;
}

/// Stacked observations over G transmissions x K subcarriers x M combiner
/// outputs, ordered g-major, then k, then output index:
/// index = (g * K + k) * M + m.
struct ObservationSet
{
    Eigen::VectorXcd mean;    // noise-free mu
    Eigen::VectorXcd samples; // y
    double noise_variance_w = 0.0;
    int n_transmissions = 0, n_subcarriers = 0, n_outputs = 0;

    int stack_index(int g, int k, int m) const
    {
        return (g * n_subcarriers + k) * n_outputs + m;
    }
};

/// mu_{g,k} = W_g^T h_k x_{g,k}, stacked in the documented order.
inline Eigen::VectorXcd noise_free_observation(ModelKind kind, const StateParams& state,
                                               const CombinerSet& combiners, const PilotSet& pilots,
                                               const ArrayGeometry& geom, const ScenarioConfig& cfg)
{
    const int G = cfg.n_transmissions, K = cfg.n_subcarriers;
    const int M = combiners.n_outputs();
    if (combiners.n_transmissions() != G)
        throw std::invalid_argument("combiner count does not match n_transmissions");
    Eigen::VectorXcd mu(G * K * M);
    for (int k = 0; k < K; ++k)
    {
        const Eigen::VectorXcd h = channel_vector(kind, state, k, geom, cfg);
        for (int g = 0; g < G; ++g)
        {
            const cd x = pilots.symbols(g, k);
            if (combiners.mode == CombinerMode::digital)
                mu.segment(static_cast<Eigen::Index>(g * K + k) * M, M) = h * x;
            else
                mu.segment(static_cast<Eigen::Index>(g * K + k) * M, M) =
                    combiners.w[g].transpose() * (h * x);
        }
    }
    return mu;
}

/// y = mu + W_g^T n with n ~ CN(0, sigma^2 I_N) per (g, k); deterministic
/// given the seed. For a unitary W_g the combined noise keeps variance
/// sigma^2 per output entry.
inline Eigen::VectorXcd sample_observation(const Eigen::VectorXcd& mu, const CombinerSet& combiners,
                                           double noise_variance_w, std::uint64_t seed,
                                           const ScenarioConfig& cfg)
{
    if (!(noise_variance_w >= 0.0)) throw std::invalid_argument("noise variance must be >= 0");
    const int G = cfg.n_transmissions, K = cfg.n_subcarriers, N = cfg.n_antennas;
    const int M = combiners.n_outputs();
    if (mu.size() != static_cast<Eigen::Index>(G) * K * M)
        throw std::invalid_argument("mean length does not match scenario dimensions");

    std::mt19937_64 rng(seed);
    Eigen::VectorXcd y = mu;
    Eigen::VectorXcd n(N);
    for (int g = 0; g < G; ++g)
        for (int k = 0; k < K; ++k)
        {
            for (int i = 0; i < N; ++i)
                n(i) = complex_gaussian(rng, noise_variance_w);
            if (combiners.mode == CombinerMode::digital)
                y.segment(static_cast<Eigen::Index>(g * K + k) * M, M) += n;
            else
                y.segment(static_cast<Eigen::Index>(g * K + k) * M, M) +=
                    combiners.w[g].transpose() * n;
        }
    return y;
}

/// Scenario bundle shared by the bound, MCRB and estimator routines.
struct Scene
{
    ScenarioConfig config;
    ArrayGeometry geometry;
    CombinerSet combiners;
    PilotSet pilots;

    Scene() = default;
    Scene(const ScenarioConfig& cfg, CombinerMode mode)
        : config(cfg), geometry(antenna_positions(cfg)),
          combiners(make_combiners(cfg, mode, cfg.seed)), pilots(make_pilots(cfg))
    {
    }

    int stacked_size() const
    {
        return config.n_transmissions * config.n_subcarriers * combiners.n_outputs();
    }
};

inline Eigen::VectorXcd noise_free_observation(ModelKind kind, const StateParams& state,
                                               const Scene& scene)
{
    return noise_free_observation(kind, state, scene.combiners, scene.pilots, scene.geometry,
                                  scene.config);
}

/// Text dump: one "re im" pair per line in stacking order, preceded by a
/// header with the dimensions. 17 significant digits round-trip doubles
/// exactly.
inline void write_observation(std::ostream& os, const ObservationSet& obs)
{
    const auto old_precision = os.precision(17);
    os << "nfmm-observation 1\n";
    os << obs.n_transmissions << ' ' << obs.n_subcarriers << ' ' << obs.n_outputs << ' '
       << obs.noise_variance_w << '\n';
    auto dump = [&os](const Eigen::VectorXcd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i)
            os << v(i).real() << ' ' << v(i).imag() << '\n';
    };
    dump(obs.mean);
    dump(obs.samples);
    os.precision(old_precision);
}

inline ObservationSet read_observation(std::istream& is)
{
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != "nfmm-observation" || version != 1)
        throw std::runtime_error("not an nfmm observation dump");
    ObservationSet obs;
    is >> obs.n_transmissions >> obs.n_subcarriers >> obs.n_outputs >> obs.noise_variance_w;
    const Eigen::Index len =
        static_cast<Eigen::Index>(obs.n_transmissions) * obs.n_subcarriers * obs.n_outputs;
    obs.mean.resize(len);
    obs.samples.resize(len);
    double re, im;
    for (Eigen::Index i = 0; i < len; ++i)
    {
        if (!(is >> re >> im)) throw std::runtime_error("truncated observation dump");
        obs.mean(i) = cd(re, im);
    }
    for (Eigen::Index i = 0; i < len; ++i)
    {
        if (!(is >> re >> im)) throw std::runtime_error("truncated observation dump");
        obs.samples(i) = cd(re, im);
    }
    return obs;
}

} // namespace nfmm
