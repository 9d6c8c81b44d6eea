#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "crn/errors.hpp"
#include "crn/filters.hpp"
#include "crn/network.hpp"
#include "crn/simulate.hpp"

namespace crn {

struct BodePoint {
    double omega;    // rad/s
    double gain_db;
    double phase;    // radians, (-pi, pi]
};

/// Frequency band of interest plus the rejection level that counts as "not
/// transmitting" for the monitor verdict.
struct BandSpec {
    double low = 0.0;          // rad/s
    double high = 0.0;         // rad/s
    double stopband_db = -60.0;

    void validate() const {
        if (!(0.0 < low) || !(low < high)) throw NetworkError("band requires 0 < low < high");
    }
};

/// Amplitude/phase/offset of the best sinusoid fit at a known frequency,
/// recovered by discrete quadrature projection over whole periods.
struct SinusoidFit {
    double amplitude;
    double phase;         // of A sin(wt + phase)
    double offset;
    double residual_rms;  // RMS misfit of samples vs the fitted sinusoid
};

/// Projects uniformly spaced samples covering an integer number of periods
/// onto sin(w t), cos(w t). Exact (to rounding) for a pure offset sinusoid.
inline SinusoidFit fit_sinusoid(std::span<const double> values, std::span<const double> times,
                                double omega) {
    const std::size_t n = values.size();
    if (n < 4 || times.size() != n) throw MeasurementError("too few samples for sinusoid fit");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double as = 0.0, ac = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = values[i] - mean;
        as += d * std::sin(omega * times[i]);
        ac += d * std::cos(omega * times[i]);
    }
    as *= 2.0 / static_cast<double>(n);
    ac *= 2.0 / static_cast<double>(n);
    double amp = std::hypot(as, ac);
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double model = mean + as * std::sin(omega * times[i]) + ac * std::cos(omega * times[i]);
        resid += (values[i] - model) * (values[i] - model);
    }
    return {amp, std::atan2(ac, as), mean, std::sqrt(resid / static_cast<double>(n))};
}

/// Probe target: either a single species or a dual-rail difference.
using SignalRef = std::variant<std::string, DualRail>;

namespace detail {

inline std::vector<double> signal_of(const Trace& trace, const SignalRef& ref) {
    if (std::holds_alternative<std::string>(ref))
        return trace.column(std::get<std::string>(ref));
    return trace.difference(std::get<DualRail>(ref));
}

inline void add_signal_drive(DriveMap& drives, const SignalRef& ref, double amplitude,
                             double omega) {
    if (std::holds_alternative<DualRail>(ref)) {
        const auto& rail = std::get<DualRail>(ref);
        drives[rail.plus] = [amplitude, omega](double t) {
            return std::max(amplitude * std::sin(omega * t), 0.0);
        };
        drives[rail.minus] = [amplitude, omega](double t) {
            return std::max(-amplitude * std::sin(omega * t), 0.0);
        };
    } else {
        // Single-rail signals must stay nonnegative: bias by the amplitude
        // and measure on the AC component only.
        const auto& name = std::get<std::string>(ref);
        drives[name] = [amplitude, omega](double t) {
            return amplitude * (1.0 + std::sin(omega * t));
        };
    }
}

}  // namespace detail

struct MeasureOptions {
    double amplitude = 1.0;
    double min_periods = 20.0;      // smallest total probe length, in periods
    double settle_tau = 0.0;        // slowest network time constant, seconds
    int samples_per_period = 64;
    double residual_threshold = 0.05;  // relative misfit that fails the point
    SimControl sim{};
};

/// Empirical frequency response at one frequency: drive the input with a
/// sinusoid, integrate past the transient, and project the output onto the
/// probe frequency. The probe runs for max(min_periods, 10 settle_tau worth)
/// periods and the first half is discarded, so at least 5 time constants of
/// transient decay precede the measurement window.
inline BodePoint measure_response(const Network& net, const SignalRef& input,
                                  const SignalRef& output, double omega,
                                  const MeasureOptions& opts = {}) {
    if (!(omega > 0.0)) throw MeasurementError("probe frequency must be positive");
    const double period = 2.0 * std::numbers::pi / omega;
    const int total_periods = static_cast<int>(
        std::ceil(std::max(opts.min_periods, 10.0 * opts.settle_tau / period)));
    const int keep_periods = std::max(total_periods / 2, 1);
    const int spp = opts.samples_per_period;
    const double dt = period / spp;
    const double t_end = total_periods * period;

    DriveMap drives;
    detail::add_signal_drive(drives, input, opts.amplitude, omega);
    Trace trace = simulate_grid(net, t_end, dt, opts.sim, drives);

    std::vector<double> y = detail::signal_of(trace, output);
    const std::size_t n_keep = static_cast<std::size_t>(keep_periods) * spp;
    if (y.size() < n_keep + 1) throw MeasurementError("trace shorter than analysis window");
    const std::size_t start = (trace.times.size() - 1) - n_keep;  // drop duplicated endpoint
    std::span<const double> window(y.data() + start, n_keep);
    std::span<const double> times(trace.times.data() + start, n_keep);

    SinusoidFit fit = fit_sinusoid(window, times, omega);
    if (fit.amplitude <= 0.0) throw MeasurementError("no response at the probe frequency");
    if (fit.residual_rms > opts.residual_threshold * fit.amplitude)
        throw MeasurementError("steady state is not sinusoidal at the probe frequency");

    double phase = fit.phase;
    while (phase > std::numbers::pi) phase -= 2.0 * std::numbers::pi;
    while (phase <= -std::numbers::pi) phase += 2.0 * std::numbers::pi;
    return {omega, 20.0 * std::log10(fit.amplitude / opts.amplitude), phase};
}

struct SweepError {
    double omega;
    std::string message;
};

/// measure_response over a frequency grid; points run concurrently and are
/// returned sorted by frequency. Per-point failures land in `errors`.
inline std::vector<BodePoint> bode_sweep(const Network& net, const SignalRef& input,
                                         const SignalRef& output, std::span<const double> omegas,
                                         const MeasureOptions& opts = {},
                                         std::vector<SweepError>* errors = nullptr) {
    if (omegas.empty()) throw MeasurementError("empty frequency grid");
    std::vector<std::future<BodePoint>> futures;
    futures.reserve(omegas.size());
    for (double w : omegas)
        futures.push_back(std::async(std::launch::async, [&, w] {
            return measure_response(net, input, output, w, opts);
        }));
    std::vector<BodePoint> points;
    for (std::size_t i = 0; i < futures.size(); ++i) {
        try {
            points.push_back(futures[i].get());
        } catch (const std::exception& e) {
            if (errors) errors->push_back({omegas[i], e.what()});
        }
    }
    std::sort(points.begin(), points.end(),
              [](const BodePoint& a, const BodePoint& b) { return a.omega < b.omega; });
    return points;
}

/// Dominant angular frequency by averaged zero-crossing intervals of the
/// detrended signal. Needs at least four crossings (three-plus periods).
inline double estimate_frequency(const Trace& trace, const SignalRef& ref) {
    std::vector<double> y = detail::signal_of(trace, ref);
    if (y.size() < 4) throw MeasurementError("trace too short for frequency estimation");
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    for (double& v : y) v -= mean;

    std::vector<double> rising, falling;
    int crossings = 0;
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
        if (y[i] == 0.0 || (y[i] < 0.0) == (y[i + 1] < 0.0)) continue;
        if (y[i + 1] == 0.0) continue;
        ++crossings;
        double frac = y[i] / (y[i] - y[i + 1]);
        double tc = trace.times[i] + frac * (trace.times[i + 1] - trace.times[i]);
        (y[i] < 0.0 ? rising : falling).push_back(tc);
    }
    if (crossings < 4) throw MeasurementError("fewer than 4 zero crossings; no oscillation");

    double period = 0.0;
    int contributions = 0;
    for (const auto& side : {rising, falling}) {
        if (side.size() >= 2) {
            period += (side.back() - side.front()) / static_cast<double>(side.size() - 1);
            ++contributions;
        }
    }
    if (contributions == 0) throw MeasurementError("crossings too one-sided to estimate a period");
    period /= contributions;
    return 2.0 * std::numbers::pi / period;
}

enum class BandVerdict { in_band, out_of_band, no_oscillation };

struct MonitorResult {
    BandVerdict verdict;
    double measured_omega;  // NaN when no oscillation was detected
    double ratio_db;        // monitor output energy vs watched AC energy
};

namespace detail {

/// Band-pass that reads a single-rail species purely catalytically; the
/// watched system cannot tell it is being observed.
inline Network monitor_bandpass(const BandPassSpec& spec, const std::string& watched,
                                double watched_initial, const DualRail& out,
                                const DualRail& integ) {
    Network net;
    net.add_species(watched, watched_initial);
    for (const auto& name : {out.plus, out.minus, integ.plus, integ.minus}) net.add_species(name);
    net.add_reaction(driven_by(watched, out.plus, spec.a()));
    net.add_reaction(decay(out.plus, spec.b()));
    net.add_reaction(decay(out.minus, spec.b()));
    net.add_reaction(driven_by(integ.plus, out.minus, spec.c()));
    net.add_reaction(driven_by(integ.minus, out.plus, spec.c()));
    net.add_reaction(driven_by(out.plus, integ.plus, 1.0));
    net.add_reaction(driven_by(out.minus, integ.minus, 1.0));
    net.add_reaction(annihilation(out));
    net.add_reaction(annihilation(integ));
    return net;
}

inline double rms(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace detail

/// Watches one species of a running network through an attached catalytic
/// band-pass whose -3 dB edges sit at [low, high]. The verdict compares the
/// monitor's output energy with the watched signal's own AC energy: a signal
/// the filter rejects below `stopband_db` is out of band.
inline MonitorResult band_monitor(const Network& net, const std::string& watched,
                                  const BandSpec& band, double window,
                                  const SimControl& ctrl = {}) {
    band.validate();
    if (!net.has_species(watched)) throw NetworkError("unknown watched species '" + watched + "'");
    if (!(window > 0.0)) throw NetworkError("monitor window must be positive");

    const double center = std::sqrt(band.low * band.high);
    const double quality = center / (band.high - band.low);
    DualRail out{"mon_y_p", "mon_y_m"};
    DualRail integ{"mon_z_p", "mon_z_m"};
    for (const auto& name : {out.plus, out.minus, integ.plus, integ.minus})
        if (net.has_species(name))
            throw NetworkError("monitor rail name '" + name + "' already used by the network");
    Network monitor = detail::monitor_bandpass({1.0, quality, center}, watched,
                                               net.initial(watched), out, integ);
    Network combined = compose(net, monitor, {{watched, watched}}, "mon");

    const double dt = std::min(2.0 * std::numbers::pi / (32.0 * band.high), window / 512.0);
    Trace trace = simulate_grid(combined, window, dt, ctrl);

    const std::size_t start = trace.times.size() / 2;
    std::vector<double> in = trace.column(watched);
    double mean = 0.0;
    for (std::size_t i = start; i < in.size(); ++i) mean += in[i];
    mean /= static_cast<double>(in.size() - start);
    std::vector<double> in_ac(in.begin() + start, in.end());
    for (double& v : in_ac) v -= mean;
    const double in_rms = detail::rms(in_ac);

    double measured = std::numeric_limits<double>::quiet_NaN();
    try {
        measured = estimate_frequency(trace, SignalRef{watched});
    } catch (const MeasurementError&) {
        return {BandVerdict::no_oscillation, measured, -std::numeric_limits<double>::infinity()};
    }
    if (!(in_rms > 0.0))
        return {BandVerdict::no_oscillation, std::numeric_limits<double>::quiet_NaN(),
                -std::numeric_limits<double>::infinity()};

    std::vector<double> out_diff = trace.difference(out);
    std::vector<double> out_tail(out_diff.begin() + start, out_diff.end());
    const double ratio_db = 20.0 * std::log10(detail::rms(out_tail) / in_rms);

    BandVerdict verdict = ratio_db >= band.stopband_db ? BandVerdict::in_band
                                                       : BandVerdict::out_of_band;
    return {verdict, measured, ratio_db};
}

}  // namespace crn
