#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "crn/errors.hpp"
#include "crn/filters.hpp"
#include "crn/network.hpp"

namespace crn {

/// A carrier sinusoid of unit amplitude whose angular frequency equals the
/// concentration of a catalyst tuning species.
struct CarrierSpec {
    double frequency = 1.0;    // rad/s
    std::string tuner = "F";

    void validate() const {
        if (!(frequency > 0.0)) throw NetworkError("carrier frequency must be positive");
    }
};

/// One modulation channel: a nonnegative single-rail input signal plus its
/// carrier oscillator rails (sine and cosine).
struct Channel {
    std::string input;  // user signal u, single-rail
    CarrierSpec carrier;
    DualRail sine;
    DualRail cosine;
};

/// Standard species naming for channel `name`: input U_<name>, rails
/// S_<name>_p/m and C_<name>_p/m, tuner F_<name>.
inline Channel make_channel(const std::string& name, double carrier_f) {
    return {"U_" + name,
            {carrier_f, "F_" + name},
            {"S_" + name + "_p", "S_" + name + "_m"},
            {"C_" + name + "_p", "C_" + name + "_m"}};
}

/// Six-reaction harmonic oscillator on dual rails, all rates unity:
///
///   F + C± -> F + C± + S±     s' =  f c
///   F + S∓ -> F + S∓ + C±     c' = -f s
///   S+ + S- -> 0, C+ + C- -> 0
///
/// Starting from s = 0, c = 1 the rail differences trace sin(ft), cos(ft)
/// with f equal to the tuner concentration.
inline Network synth_oscillator(const CarrierSpec& spec, const DualRail& sine,
                                const DualRail& cosine) {
    spec.validate();
    detail::require_distinct({sine.plus, sine.minus, cosine.plus, cosine.minus, spec.tuner});
    Network net;
    net.add_species(spec.tuner, spec.frequency);
    net.add_species(sine.plus, 0.0);
    net.add_species(sine.minus, 0.0);
    net.add_species(cosine.plus, 1.0);
    net.add_species(cosine.minus, 0.0);

    auto catalyzed = [&](const std::string& in, const std::string& out) {
        return Reaction{{{spec.tuner, 1}, {in, 1}}, {{spec.tuner, 1}, {in, 1}, {out, 1}}, 1.0};
    };
    net.add_reaction(catalyzed(cosine.plus, sine.plus));
    net.add_reaction(catalyzed(cosine.minus, sine.minus));
    net.add_reaction(catalyzed(sine.minus, cosine.plus));
    net.add_reaction(catalyzed(sine.plus, cosine.minus));
    net.add_reaction(detail::annihilation(sine));
    net.add_reaction(detail::annihilation(cosine));
    return net;
}

/// Returns a copy with the tuner's initial concentration set to `new_f`.
/// Tuners are catalysts, so this is the only knob the frequency has.
inline Network retune(const Network& net, const std::string& tuner, double new_f) {
    if (!net.has_species(tuner)) throw NetworkError("unknown tuner species '" + tuner + "'");
    Network out = net;
    out.set_initial(tuner, new_f);
    return out;
}

namespace detail {

/// The 2n+2 medium reactions: one shared decay pair plus, per channel, the
/// catalytic products U_i + S_i± -> U_i + S_i± + M±. All at `rate`, so the
/// medium difference pursues sum_i u_i s_i with first-order lag 1/rate.
inline void add_medium_reactions(Network& net, std::span<const Channel> channels,
                                 const DualRail& medium, double rate) {
    net.ensure_species(medium.plus);
    net.ensure_species(medium.minus);
    net.add_reaction(decay(medium.plus, rate));
    net.add_reaction(decay(medium.minus, rate));
    for (const auto& ch : channels) {
        net.ensure_species(ch.input);
        net.add_reaction({{{ch.input, 1}, {ch.sine.plus, 1}},
                          {{ch.input, 1}, {ch.sine.plus, 1}, {medium.plus, 1}},
                          rate});
        net.add_reaction({{{ch.input, 1}, {ch.sine.minus, 1}},
                          {{ch.input, 1}, {ch.sine.minus, 1}, {medium.minus, 1}},
                          rate});
    }
}

}  // namespace detail

/// Amplitude modulator: carrier oscillator plus a four-reaction multiplier.
/// The medium difference m obeys m' = r (u s - m), a pursuit of the product
/// u(t) sin(ft) that sharpens as the pursuit rate r grows.
inline Network synth_modulator(const Channel& ch, const DualRail& medium, double pursuit_rate) {
    if (!(pursuit_rate > 0.0)) throw NetworkError("pursuit rate must be positive");
    Network net = synth_oscillator(ch.carrier, ch.sine, ch.cosine);
    detail::add_medium_reactions(net, {&ch, 1}, medium, pursuit_rate);
    return net;
}

/// Superposition of n modulators on one shared medium pair:
/// m' = r (sum_i u_i s_i - m). Only one copy of the medium decay reactions is
/// emitted. Duplicate carrier frequencies are legal but cannot be separated
/// downstream; they are reported through `warnings`.
inline Network synth_multiplexer(std::span<const Channel> channels, const DualRail& medium,
                                 double pursuit_rate,
                                 std::vector<std::string>* warnings = nullptr) {
    if (channels.empty()) throw NetworkError("multiplexer needs at least one channel");
    if (!(pursuit_rate > 0.0)) throw NetworkError("pursuit rate must be positive");
    std::vector<std::string> names{medium.plus, medium.minus};
    for (const auto& ch : channels)
        for (const auto& n : {ch.input, ch.carrier.tuner, ch.sine.plus, ch.sine.minus,
                              ch.cosine.plus, ch.cosine.minus})
            names.push_back(n);
    for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = i + 1; j < names.size(); ++j)
            if (names[i] == names[j])
                throw NetworkError("multiplexer channel species collide on '" + names[i] + "'");
    for (std::size_t i = 0; i < channels.size(); ++i)
        for (std::size_t j = i + 1; j < channels.size(); ++j)
            if (channels[i].carrier.frequency == channels[j].carrier.frequency && warnings)
                warnings->push_back("channels '" + channels[i].input + "' and '" +
                                    channels[j].input +
                                    "' share a carrier frequency; demodulation cannot separate them");

    Network net = synth_oscillator(channels[0].carrier, channels[0].sine, channels[0].cosine);
    for (std::size_t i = 1; i < channels.size(); ++i) {
        Network osc = synth_oscillator(channels[i].carrier, channels[i].sine, channels[i].cosine);
        net = compose(net, osc, {});
    }
    detail::add_medium_reactions(net, channels, medium, pursuit_rate);
    return net;
}

/// Demodulator parameters: band-pass selection at the carrier, then slope
/// detection by tapping the positive rail into a low-pass chain.
struct DemodSpec {
    double carrier_f = 1.0;
    double quality = 2.0;      // band-pass Q
    double lp_cutoff = 0.0;    // 0 -> carrier_f / 5
    int lp_order = 1;          // 1 or 2 cascaded first-order stages

    double cutoff() const { return lp_cutoff > 0.0 ? lp_cutoff : carrier_f / 5.0; }

    void validate() const {
        if (!(carrier_f > 0.0) || !(quality > 0.0))
            throw NetworkError("demodulator requires carrier_f > 0 and quality > 0");
        if (!(cutoff() < carrier_f))
            throw NetworkError("low-pass cutoff must sit below the carrier frequency");
        if (lp_order != 1 && lp_order != 2)
            throw NetworkError("lp_order must be 1 or 2");
    }
};

/// Envelope detector on the medium: unity-gain band-pass centered on the
/// carrier, rectification by using only the band-pass's positive rail, then
/// `lp_order` first-order low-pass stages into the single-rail output.
inline Network synth_demodulator(const DemodSpec& spec, const DualRail& medium,
                                 const std::string& output) {
    spec.validate();
    DualRail selected{output + "_bp_p", output + "_bp_m"};
    Network net = synth_bandpass({1.0, spec.quality, spec.carrier_f}, medium, selected);

    LowPassSpec lp{spec.cutoff(), spec.cutoff()};
    if (spec.lp_order == 1) {
        net = compose(net, synth_lowpass(lp, selected.plus, output),
                      {{selected.plus, selected.plus}});
    } else {
        std::string mid = output + "_s1";
        net = compose(net, synth_lowpass(lp, selected.plus, mid), {{selected.plus, selected.plus}});
        net = compose(net, synth_lowpass(lp, mid, output), {{mid, mid}});
    }
    return net;
}

/// Frequency-modulation variant: the oscillator's tuner chases a driven
/// input species, so the instantaneous frequency follows the input signal.
inline Network synth_fm_modulator(const CarrierSpec& base, const DualRail& sine,
                                  const DualRail& cosine, const std::string& freq_input,
                                  double tracking_rate) {
    if (!(tracking_rate > 0.0)) throw NetworkError("tracking rate must be positive");
    Network net = synth_oscillator(base, sine, cosine);
    net.add_species(freq_input, base.frequency);
    net.add_reaction(detail::decay(base.tuner, tracking_rate));
    net.add_reaction(detail::driven_by(freq_input, base.tuner, tracking_rate));
    return net;
}

}  // namespace crn
