#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "crn/errors.hpp"
#include "crn/network.hpp"

namespace crn {

/// First-order low-pass: H(s) = k / (s + c). DC gain is k/c; the -3 dB corner
/// sits at the cutoff.
struct LowPassSpec {
    double cutoff = 1.0;  // c, rad/s
    double gain = 1.0;    // k

    void validate() const {
        if (!(cutoff > 0.0) || !(gain > 0.0))
            throw NetworkError("low-pass spec requires cutoff > 0 and gain > 0");
    }
};

/// Second-order band-pass: H(s) = a s / (s^2 + b s + c) with a = k w0/Q,
/// b = w0/Q, c = w0^2. Peak gain k at the center, -3 dB bandwidth w0/Q.
struct BandPassSpec {
    double gain = 1.0;     // k
    double quality = 1.0;  // Q
    double center = 1.0;   // w0, rad/s

    double a() const { return gain * (center / quality); }
    double b() const { return center / quality; }
    double c() const { return center * center; }

    void validate() const {
        if (!(gain > 0.0) || !(quality > 0.0) || !(center > 0.0))
            throw NetworkError("band-pass spec requires gain, quality, center > 0");
    }
};

/// Rational transfer function in s; coefficients ascending by power.
struct TransferFunction {
    std::vector<double> num;
    std::vector<double> den;
};

inline TransferFunction analytic_tf(const LowPassSpec& spec) {
    spec.validate();
    return {{spec.gain}, {spec.cutoff, 1.0}};
}

inline TransferFunction analytic_tf(const BandPassSpec& spec) {
    spec.validate();
    return {{0.0, spec.a()}, {spec.c(), spec.b(), 1.0}};
}

struct Response {
    double gain_db;
    double phase;  // radians, (-pi, pi]
};

/// Gain and phase at angular frequency w: 20 log10 |H(jw)| and arg H(jw).
inline Response tf_response(const TransferFunction& tf, double omega) {
    if (omega < 0.0) throw NetworkError("tf_response requires omega >= 0");
    auto eval = [&](const std::vector<double>& coeffs) {
        std::complex<double> s(0.0, omega), acc(0.0, 0.0), p(1.0, 0.0);
        for (double c : coeffs) {
            acc += c * p;
            p *= s;
        }
        return acc;
    };
    std::complex<double> d = eval(tf.den);
    if (std::abs(d) == 0.0) throw NetworkError("transfer function pole at the requested frequency");
    std::complex<double> h = eval(tf.num) / d;
    double phase = std::arg(h);
    if (phase <= -std::numbers::pi) phase += 2.0 * std::numbers::pi;
    return {20.0 * std::log10(std::abs(h)), phase};
}

namespace detail {

inline void require_distinct(std::initializer_list<std::string> names) {
    for (auto i = names.begin(); i != names.end(); ++i)
        for (auto j = std::next(i); j != names.end(); ++j)
            if (*i == *j) throw NetworkError("species names must be distinct: '" + *i + "'");
}

/// Catalytic production: in ->{rate} in + out.
inline Reaction driven_by(const std::string& in, const std::string& out, double rate) {
    return {{{in, 1}}, {{in, 1}, {out, 1}}, rate};
}

/// First-order decay: sp ->{rate} 0.
inline Reaction decay(const std::string& sp, double rate) {
    return {{{sp, 1}}, {}, rate};
}

/// Pair annihilation: plus + minus ->{1} 0. Bounds rail magnitudes without
/// touching the rail difference dynamics.
inline Reaction annihilation(const DualRail& rail) {
    return {{{rail.plus, 1}, {rail.minus, 1}}, {}, 1.0};
}

}  // namespace detail

/// Single-rail pure-pursuit low-pass: the output chases gain * input.
///
///   output ->{c} 0
///   input  ->{k} input + output
///
/// The input is a pure catalyst, so attaching the filter never perturbs it.
inline Network synth_lowpass(const LowPassSpec& spec, const std::string& input,
                             const std::string& output) {
    spec.validate();
    detail::require_distinct({input, output});
    Network net;
    net.add_species(input);
    net.add_species(output);
    net.add_reaction(detail::decay(output, spec.cutoff));
    net.add_reaction(detail::driven_by(input, output, spec.gain));
    return net;
}

/// Dual-rail low-pass: each input rail drives the matching output rail, each
/// output rail decays, and the output pair annihilates. The rail difference
/// obeys v_out' = k v_in - c v_out.
inline Network synth_lowpass_dualrail(const LowPassSpec& spec, const DualRail& input,
                                      const DualRail& output) {
    spec.validate();
    detail::require_distinct({input.plus, input.minus, output.plus, output.minus});
    Network net;
    for (const auto& name : {input.plus, input.minus, output.plus, output.minus})
        net.add_species(name);
    net.add_reaction(detail::driven_by(input.plus, output.plus, spec.gain));
    net.add_reaction(detail::driven_by(input.minus, output.minus, spec.gain));
    net.add_reaction(detail::decay(output.plus, spec.cutoff));
    net.add_reaction(detail::decay(output.minus, spec.cutoff));
    net.add_reaction(detail::annihilation(output));
    return net;
}

/// Derived names for a band-pass filter's internal integrator rails.
inline DualRail bandpass_integrator_rails(const DualRail& output) {
    return {output.plus + "_z", output.minus + "_z"};
}

/// Dual-rail band-pass around rail differences x (input), y (output) and an
/// internal integrator z:
///
///   y' = a x - b y - c z,   z' = y
///
/// realized by catalytic drives, decays, cross-coupled integrator feedback,
/// and pair annihilations that bound the rails. Inputs stay catalytic.
inline Network synth_bandpass(const BandPassSpec& spec, const DualRail& input,
                              const DualRail& output, const DualRail& integ = {}) {
    spec.validate();
    DualRail z = integ.plus.empty() ? bandpass_integrator_rails(output) : integ;
    detail::require_distinct(
        {input.plus, input.minus, output.plus, output.minus, z.plus, z.minus});
    Network net;
    for (const auto& name :
         {input.plus, input.minus, output.plus, output.minus, z.plus, z.minus})
        net.add_species(name);
    net.add_reaction(detail::driven_by(input.plus, output.plus, spec.a()));
    net.add_reaction(detail::driven_by(input.minus, output.minus, spec.a()));
    net.add_reaction(detail::decay(output.plus, spec.b()));
    net.add_reaction(detail::decay(output.minus, spec.b()));
    net.add_reaction(detail::driven_by(z.plus, output.minus, spec.c()));
    net.add_reaction(detail::driven_by(z.minus, output.plus, spec.c()));
    net.add_reaction(detail::driven_by(output.plus, z.plus, 1.0));
    net.add_reaction(detail::driven_by(output.minus, z.minus, 1.0));
    net.add_reaction(detail::annihilation(output));
    net.add_reaction(detail::annihilation(z));
    return net;
}

/// Band-pass variant with all rates at unity and the a/b/c coefficients
/// carried by the concentrations of catalyst species instead, so the filter
/// can be retuned chemically while running.
inline Network synth_bandpass_catalytic(const BandPassSpec& spec, const DualRail& input,
                                        const DualRail& output, const DualRail& integ = {},
                                        const std::string& drive_tuner = "A",
                                        const std::string& decay_tuner = "B",
                                        const std::string& feedback_tuner = "C") {
    spec.validate();
    DualRail z = integ.plus.empty() ? bandpass_integrator_rails(output) : integ;
    detail::require_distinct({input.plus, input.minus, output.plus, output.minus, z.plus, z.minus,
                              drive_tuner, decay_tuner, feedback_tuner});
    Network net;
    for (const auto& name :
         {input.plus, input.minus, output.plus, output.minus, z.plus, z.minus})
        net.add_species(name);
    net.add_species(drive_tuner, spec.a());
    net.add_species(decay_tuner, spec.b());
    net.add_species(feedback_tuner, spec.c());

    auto catalyzed = [](const std::string& cat, const std::string& in, const std::string& out) {
        return Reaction{{{cat, 1}, {in, 1}}, {{cat, 1}, {in, 1}, {out, 1}}, 1.0};
    };
    net.add_reaction(catalyzed(drive_tuner, input.plus, output.plus));
    net.add_reaction(catalyzed(drive_tuner, input.minus, output.minus));
    net.add_reaction({{{decay_tuner, 1}, {output.plus, 1}}, {{decay_tuner, 1}}, 1.0});
    net.add_reaction({{{decay_tuner, 1}, {output.minus, 1}}, {{decay_tuner, 1}}, 1.0});
    net.add_reaction(catalyzed(feedback_tuner, z.plus, output.minus));
    net.add_reaction(catalyzed(feedback_tuner, z.minus, output.plus));
    net.add_reaction(detail::driven_by(output.plus, z.plus, 1.0));
    net.add_reaction(detail::driven_by(output.minus, z.minus, 1.0));
    net.add_reaction(detail::annihilation(output));
    net.add_reaction(detail::annihilation(z));
    return net;
}

}  // namespace crn
