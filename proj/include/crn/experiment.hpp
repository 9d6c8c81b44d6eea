#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "crn/analysis.hpp"
#include "crn/dsl.hpp"
#include "crn/errors.hpp"
#include "crn/modem.hpp"
#include "crn/network.hpp"
#include "crn/simulate.hpp"

namespace crn {

/// Input waveform for a channel. Sine values are offset + amplitude *
/// sin(freq t); the offset must cover the amplitude because user signals are
/// single-rail and cannot go negative.
struct Waveform {
    enum class Kind { constant, sine };
    Kind kind = Kind::constant;
    double amplitude = 1.0;
    double freq = 0.0;    // rad/s, sine only
    double offset = 0.0;  // sine only

    double operator()(double t) const {
        return kind == Kind::constant ? amplitude : offset + amplitude * std::sin(freq * t);
    }

    void validate() const {
        if (kind == Kind::constant) {
            if (amplitude < 0.0) throw NetworkError("constant waveform must be nonnegative");
        } else {
            if (!(freq > 0.0)) throw NetworkError("sine waveform requires freq > 0");
            if (offset < std::abs(amplitude))
                throw NetworkError("sine waveform dips negative; raise the offset");
        }
    }
};

struct ChannelConfig {
    std::string name;
    double carrier_f = 1.0;
    Waveform waveform;
};

struct ExperimentConfig {
    double duration = 0.0;
    double sample_dt = 0.0;
    std::vector<ChannelConfig> channels;
    std::vector<DemodSpec> demodulators;
    double pursuit_rate = 0.0;         // 0 -> 100 x largest carrier frequency
    double transient_fraction = 0.5;   // leading fraction excluded from metrics
    SimControl sim{};

    double effective_pursuit_rate() const {
        if (pursuit_rate > 0.0) return pursuit_rate;
        double fmax = 0.0;
        for (const auto& ch : channels) fmax = std::max(fmax, ch.carrier_f);
        return 100.0 * fmax;
    }
};

inline ExperimentConfig experiment_from_json(const nlohmann::json& j) {
    try {
        ExperimentConfig cfg;
        cfg.duration = j.at("duration").get<double>();
        cfg.sample_dt = j.at("sample_dt").get<double>();
        for (const auto& cj : j.at("channels")) {
            ChannelConfig ch;
            ch.name = cj.at("name").get<std::string>();
            ch.carrier_f = cj.at("carrier_f").get<double>();
            const auto& wj = cj.at("waveform");
            std::string kind = wj.at("kind").get<std::string>();
            if (kind == "const")
                ch.waveform.kind = Waveform::Kind::constant;
            else if (kind == "sine")
                ch.waveform.kind = Waveform::Kind::sine;
            else
                throw NetworkError("waveform kind must be 'const' or 'sine'");
            ch.waveform.amplitude = wj.value("amplitude", 1.0);
            ch.waveform.freq = wj.value("freq", 0.0);
            ch.waveform.offset = wj.value("offset", 0.0);
            cfg.channels.push_back(std::move(ch));
        }
        for (const auto& dj : j.value("demodulators", nlohmann::json::array())) {
            DemodSpec d;
            d.carrier_f = dj.at("carrier_f").get<double>();
            d.quality = dj.value("Q", 2.0);
            d.lp_cutoff = dj.value("lp_cutoff", 0.0);
            d.lp_order = dj.value("lp_order", 1);
            cfg.demodulators.push_back(d);
        }
        cfg.pursuit_rate = j.value("pursuit_rate", 0.0);
        cfg.transient_fraction = j.value("transient_fraction", 0.5);
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw NetworkError(std::string("malformed experiment config: ") + e.what());
    }
}

struct ChannelMetrics {
    double nrmse;           // affine-fit residual over recovered-signal RMS
    double corr_own;        // correlation with this channel's input
    double corr_other_max;  // worst cross-channel correlation magnitude
};

struct ExperimentReport {
    Network network;
    Trace trace;
    std::map<std::string, ChannelMetrics> per_channel;
    std::map<std::string, std::string> demod_outputs;  // channel name -> output species
    std::vector<std::string> warnings;

    nlohmann::json metrics_json() const {
        nlohmann::json per = nlohmann::json::object();
        for (const auto& [name, m] : per_channel)
            per[name] = {{"nrmse", m.nrmse},
                         {"corr_own", m.corr_own},
                         {"corr_other_max", m.corr_other_max}};
        return {{"per_channel", per}};
    }

    /// Writes trace.csv, metrics.json, and network.crn into `dir`.
    void write(const std::filesystem::path& dir) const {
        std::filesystem::create_directories(dir);
        {
            std::ofstream os(dir / "trace.csv", std::ios::binary);
            trace.write_csv(os);
        }
        {
            std::ofstream os(dir / "metrics.json", std::ios::binary);
            os << metrics_json().dump(2) << '\n';
        }
        {
            std::ofstream os(dir / "network.crn", std::ios::binary);
            os << serialize_network(network);
        }
    }
};

namespace detail {

inline double pearson(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

/// Residual RMS of the least-squares affine fit b ~ alpha a + beta, relative
/// to the RMS of the mean-removed b. Diode detection recovers the envelope
/// up to offset and scale, so the affine fit is removed before scoring.
inline double affine_nrmse(std::span<const double> a, std::span<const double> b) {
    double r = pearson(a, b);
    return std::sqrt(std::max(0.0, 1.0 - r * r));
}

}  // namespace detail

/// Builds the full multiplexer + demodulator network, simulates it with the
/// configured input waveforms, and scores each demodulated output against the
/// channel inputs on the post-transient window.
inline ExperimentReport run_modem_experiment(const ExperimentConfig& cfg) {
    if (!(cfg.duration > 0.0)) throw NetworkError("experiment duration must be positive");
    if (!(cfg.sample_dt > 0.0)) throw NetworkError("experiment sample_dt must be positive");
    if (cfg.channels.empty()) throw NetworkError("experiment needs at least one channel");
    if (!(cfg.transient_fraction >= 0.0 && cfg.transient_fraction < 1.0))
        throw NetworkError("transient_fraction must lie in [0, 1)");

    ExperimentReport report;
    const DualRail medium{"M_p", "M_m"};
    const double rate = cfg.effective_pursuit_rate();

    std::vector<Channel> channels;
    for (const auto& ch : cfg.channels) {
        ch.waveform.validate();
        channels.push_back(make_channel(ch.name, ch.carrier_f));
    }
    Network net = synth_multiplexer(channels, medium, rate, &report.warnings);

    for (std::size_t i = 0; i < cfg.demodulators.size(); ++i) {
        const DemodSpec& spec = cfg.demodulators[i];
        std::string channel_name;
        for (const auto& ch : cfg.channels)
            if (ch.carrier_f == spec.carrier_f) channel_name = ch.name;
        std::string output =
            "out_" + (channel_name.empty() ? std::to_string(i + 1) : channel_name);
        if (channel_name.empty())
            report.warnings.push_back("demodulator at " + format_double(spec.carrier_f) +
                                      " rad/s matches no channel carrier");
        else
            report.demod_outputs[channel_name] = output;
        Network demod = synth_demodulator(spec, medium, output);
        net = compose(net, demod, {{medium.plus, medium.plus}, {medium.minus, medium.minus}},
                      "d" + std::to_string(i + 1));
    }

    DriveMap drives;
    for (const auto& ch : cfg.channels) drives["U_" + ch.name] = ch.waveform;

    report.network = net;
    report.trace = simulate_grid(net, cfg.duration, cfg.sample_dt, cfg.sim, drives);

    const std::size_t start = static_cast<std::size_t>(
        static_cast<double>(report.trace.times.size()) * cfg.transient_fraction);
    auto tail = [&](const std::vector<double>& full) {
        return std::vector<double>(full.begin() + start, full.end());
    };

    std::map<std::string, std::vector<double>> inputs;
    for (const auto& ch : cfg.channels) inputs[ch.name] = tail(report.trace.column("U_" + ch.name));

    for (const auto& [channel_name, output] : report.demod_outputs) {
        std::vector<double> recovered = tail(report.trace.column(output));
        ChannelMetrics m{};
        m.corr_own = detail::pearson(inputs.at(channel_name), recovered);
        m.nrmse = detail::affine_nrmse(inputs.at(channel_name), recovered);
        m.corr_other_max = 0.0;
        for (const auto& [other, u] : inputs)
            if (other != channel_name)
                m.corr_other_max =
                    std::max(m.corr_other_max, std::abs(detail::pearson(u, recovered)));
        report.per_channel[channel_name] = m;
    }
    return report;
}

}  // namespace crn
