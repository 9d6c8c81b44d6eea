// Command-line front end: compile networks to ODE listings, simulate traces,
// synthesize filter/modem networks, measure Bode responses, run modem
// experiments, and monitor a species' oscillation band.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crn/analysis.hpp"
#include "crn/dsl.hpp"
#include "crn/experiment.hpp"
#include "crn/filters.hpp"
#include "crn/modem.hpp"
#include "crn/network.hpp"
#include "crn/ode.hpp"
#include "crn/simulate.hpp"
#include "crn/svg.hpp"

namespace {

constexpr int kErrorExit = 10;

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

crn::Network load_network(const std::string& path) {
    std::string text = read_file(path);
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
        return crn::network_from_json(nlohmann::json::parse(text));
    return crn::parse_network(text);
}

void write_network(const crn::Network& net, const std::string& format,
                   const std::string& out_path) {
    std::string text;
    if (format == "json")
        text = crn::network_to_json(net).dump(2) + "\n";
    else
        text = crn::serialize_network(net);
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        std::ofstream os(out_path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write '" + out_path + "'");
        os << text;
    }
}

// Drive spec grammar: NAME=const:VALUE or NAME=sine:AMP,OMEGA[,OFFSET]
crn::DriveFn parse_drive_fn(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos) throw std::runtime_error("bad drive spec '" + spec + "'");
    std::string kind = spec.substr(0, colon);
    std::vector<double> args;
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v;
        if (!crn::parse_double(item, v)) throw std::runtime_error("bad drive number '" + item + "'");
        args.push_back(v);
    }
    if (kind == "const" && args.size() == 1) {
        double v = args[0];
        return [v](double) { return v; };
    }
    if (kind == "sine" && (args.size() == 2 || args.size() == 3)) {
        double amp = args[0], omega = args[1], offset = args.size() == 3 ? args[2] : 0.0;
        return [=](double t) { return offset + amp * std::sin(omega * t); };
    }
    throw std::runtime_error("bad drive spec '" + spec + "' (use const:V or sine:A,W[,OFF])");
}

crn::DriveMap parse_drives(const std::vector<std::string>& specs) {
    crn::DriveMap drives;
    for (const auto& s : specs) {
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("drive spec '" + s + "' missing NAME=");
        drives[s.substr(0, eq)] = parse_drive_fn(s.substr(eq + 1));
    }
    return drives;
}

crn::SignalRef make_signal_ref(const std::string& single, const std::string& rail) {
    if (!single.empty() && !rail.empty())
        throw std::runtime_error("give either a species or a rail pair, not both");
    if (!single.empty()) return single;
    auto comma = rail.find(',');
    if (comma == std::string::npos)
        throw std::runtime_error("rail spec must be PLUS,MINUS");
    return crn::DualRail{rail.substr(0, comma), rail.substr(comma + 1)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic chemical reaction networks as signal processors"};
    app.require_subcommand(1);

    crn::SimControl sim;
    app.add_option("--tol-rel", sim.rel_tol, "relative integration tolerance")
        ->capture_default_str();
    app.add_option("--tol-abs", sim.abs_tol, "absolute integration tolerance")
        ->capture_default_str();

    // --- compile -----------------------------------------------------------
    auto* cmd_compile = app.add_subcommand("compile", "print the mass-action ODEs of a network");
    std::string compile_file;
    cmd_compile->add_option("file", compile_file, "network file (.crn or .json)")->required();

    // --- simulate ----------------------------------------------------------
    auto* cmd_sim = app.add_subcommand("simulate", "integrate a network and write a CSV trace");
    std::string sim_file, sim_out;
    double sim_t_end = 0.0, sim_dt = 0.0;
    std::vector<std::string> sim_drives;
    cmd_sim->add_option("file", sim_file, "network file")->required();
    cmd_sim->add_option("--t-end", sim_t_end, "end time, seconds")->required();
    cmd_sim->add_option("--dt", sim_dt, "sample spacing (default: integrator steps)");
    cmd_sim->add_option("--out", sim_out, "output CSV path")->required();
    cmd_sim->add_option("--drive", sim_drives,
                        "force a species: NAME=const:V or NAME=sine:A,W[,OFF] (repeatable)");

    // --- synth -------------------------------------------------------------
    auto* cmd_synth = app.add_subcommand("synth", "synthesize a network");
    cmd_synth->require_subcommand(1);
    std::string synth_format = "dsl", synth_out;
    for (auto* sub : {cmd_synth}) {
        sub->add_option("--format", synth_format, "dsl or json")->capture_default_str();
        sub->add_option("--out", synth_out, "output file (default stdout)");
    }

    auto* synth_lp = cmd_synth->add_subcommand("lowpass", "first-order low-pass filter");
    double lp_c = 1.0, lp_k = 1.0;
    std::string lp_in = "Vin", lp_out_name = "Vout";
    bool lp_dualrail = false;
    synth_lp->add_option("--c", lp_c, "cutoff, rad/s")->required();
    synth_lp->add_option("--k", lp_k, "gain")->required();
    synth_lp->add_option("--input", lp_in, "input species (base name when dual-rail)")
        ->capture_default_str();
    synth_lp->add_option("--output", lp_out_name, "output species")->capture_default_str();
    synth_lp->add_flag("--dualrail", lp_dualrail, "dual-rail (signed) variant");

    auto* synth_bp = cmd_synth->add_subcommand("bandpass", "second-order band-pass filter");
    double bp_k = 0.0, bp_q = 0.0, bp_w0 = 0.0, bp_a = 0.0, bp_b = 0.0, bp_c = 0.0;
    bool bp_catalytic = false;
    synth_bp->add_option("--k", bp_k, "gain");
    synth_bp->add_option("--q", bp_q, "quality factor");
    synth_bp->add_option("--w0", bp_w0, "center frequency, rad/s");
    synth_bp->add_option("--a", bp_a, "raw numerator coefficient a");
    synth_bp->add_option("--b", bp_b, "raw damping coefficient b");
    synth_bp->add_option("--c", bp_c, "raw stiffness coefficient c");
    synth_bp->add_flag("--catalytic", bp_catalytic,
                       "tune with catalyst concentrations instead of rate constants");

    auto* synth_osc = cmd_synth->add_subcommand("oscillator", "dual-rail sine/cosine source");
    double osc_f = 0.0;
    std::string osc_tuner = "F";
    synth_osc->add_option("--f", osc_f, "carrier frequency, rad/s")->required();
    synth_osc->add_option("--tuner", osc_tuner, "tuning species")->capture_default_str();

    auto* synth_mod = cmd_synth->add_subcommand("modulator", "single-channel AM modulator");
    double mod_f = 0.0, mod_rate = 0.0;
    std::string mod_input = "U";
    synth_mod->add_option("--f", mod_f, "carrier frequency, rad/s")->required();
    synth_mod->add_option("--input", mod_input, "input signal species")->capture_default_str();
    synth_mod->add_option("--pursuit-rate", mod_rate, "multiplier rate (default 100f)");

    auto* synth_mux = cmd_synth->add_subcommand("multiplexer", "multi-channel AM multiplexer");
    std::vector<std::string> mux_channels;
    double mux_rate = 0.0;
    synth_mux->add_option("--channel", mux_channels, "NAME:FREQ (repeatable)")->required();
    synth_mux->add_option("--pursuit-rate", mux_rate, "multiplier rate (default 100 max f)");

    auto* synth_dem = cmd_synth->add_subcommand("demodulator", "band-pass + diode-detector chain");
    crn::DemodSpec dem_spec;
    std::string dem_medium = "M_p,M_m", dem_output = "out";
    synth_dem->add_option("--carrier", dem_spec.carrier_f, "carrier to select, rad/s")->required();
    synth_dem->add_option("--q", dem_spec.quality, "band-pass quality")->capture_default_str();
    synth_dem->add_option("--lp-cutoff", dem_spec.lp_cutoff, "low-pass cutoff (default f/5)");
    synth_dem->add_option("--lp-order", dem_spec.lp_order, "1 or 2")->capture_default_str();
    synth_dem->add_option("--medium", dem_medium, "medium rails PLUS,MINUS")->capture_default_str();
    synth_dem->add_option("--output", dem_output, "recovered output species")
        ->capture_default_str();

    // --- bode --------------------------------------------------------------
    auto* cmd_bode = app.add_subcommand("bode", "measure a frequency response");
    std::string bode_file, bode_in, bode_in_rail, bode_out_sp, bode_out_rail, bode_csv, bode_svg;
    double bode_wmin = 0.0, bode_wmax = 0.0, bode_amp = 1.0, bode_settle = 0.0;
    int bode_points = 20;
    cmd_bode->add_option("file", bode_file, "network file")->required();
    cmd_bode->add_option("--input", bode_in, "single-rail input species");
    cmd_bode->add_option("--input-rail", bode_in_rail, "dual-rail input PLUS,MINUS");
    cmd_bode->add_option("--output", bode_out_sp, "single-rail output species");
    cmd_bode->add_option("--output-rail", bode_out_rail, "dual-rail output PLUS,MINUS");
    cmd_bode->add_option("--w-min", bode_wmin, "lowest frequency, rad/s")->required();
    cmd_bode->add_option("--w-max", bode_wmax, "highest frequency, rad/s")->required();
    cmd_bode->add_option("--points", bode_points, "log-spaced point count")->capture_default_str();
    cmd_bode->add_option("--amplitude", bode_amp, "probe amplitude")->capture_default_str();
    cmd_bode->add_option("--settle-tau", bode_settle, "slowest time constant, seconds");
    cmd_bode->add_option("--out", bode_csv, "output CSV path")->required();
    cmd_bode->add_option("--svg", bode_svg, "optional SVG plot path");

    // --- modem -------------------------------------------------------------
    auto* cmd_modem = app.add_subcommand("modem", "run a modulation/demodulation experiment");
    std::string modem_config, modem_dir;
    cmd_modem->add_option("config", modem_config, "experiment config JSON")->required();
    cmd_modem->add_option("--out-dir", modem_dir, "report directory")->required();

    // --- monitor -----------------------------------------------------------
    auto* cmd_mon = app.add_subcommand("monitor", "check a species' oscillation band");
    std::string mon_file, mon_species;
    double mon_low = 0.0, mon_high = 0.0, mon_stop = -60.0, mon_window = 0.0;
    cmd_mon->add_option("file", mon_file, "network file")->required();
    cmd_mon->add_option("--species", mon_species, "watched species")->required();
    cmd_mon->add_option("--low", mon_low, "band low edge, rad/s")->required();
    cmd_mon->add_option("--high", mon_high, "band high edge, rad/s")->required();
    cmd_mon->add_option("--stopband-db", mon_stop, "rejection threshold, dB")
        ->capture_default_str();
    cmd_mon->add_option("--window", mon_window, "observation window, seconds")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_compile) {
            std::cout << crn::format_system(crn::compile_odes(load_network(compile_file)));
            return 0;
        }

        if (*cmd_sim) {
            crn::Network net = load_network(sim_file);
            crn::DriveMap drives = parse_drives(sim_drives);
            crn::Trace trace = sim_dt > 0.0
                                   ? crn::simulate_grid(net, sim_t_end, sim_dt, sim, drives)
                                   : crn::simulate(net, sim_t_end, sim, drives);
            std::ofstream os(sim_out, std::ios::binary);
            if (!os) throw std::runtime_error("cannot write '" + sim_out + "'");
            trace.write_csv(os);
            return 0;
        }

        if (*cmd_synth) {
            crn::Network net;
            if (*synth_lp) {
                crn::LowPassSpec spec{lp_c, lp_k};
                net = lp_dualrail
                          ? crn::synth_lowpass_dualrail(spec, {lp_in + "_p", lp_in + "_m"},
                                                        {lp_out_name + "_p", lp_out_name + "_m"})
                          : crn::synth_lowpass(spec, lp_in, lp_out_name);
            } else if (*synth_bp) {
                crn::BandPassSpec spec;
                if (bp_w0 > 0.0) {
                    spec = {bp_k, bp_q, bp_w0};
                } else if (bp_c > 0.0 && bp_b > 0.0) {
                    double w0 = std::sqrt(bp_c);
                    spec = {bp_a / bp_b, w0 / bp_b, w0};
                } else {
                    throw std::runtime_error("give --k/--q/--w0 or raw --a/--b/--c");
                }
                crn::DualRail in{"Xp", "Xm"}, out{"Yp", "Ym"}, integ{"Zp", "Zm"};
                net = bp_catalytic ? crn::synth_bandpass_catalytic(spec, in, out, integ)
                                   : crn::synth_bandpass(spec, in, out, integ);
            } else if (*synth_osc) {
                net = crn::synth_oscillator({osc_f, osc_tuner}, {"Sp", "Sm"}, {"Cp", "Cm"});
            } else if (*synth_mod) {
                crn::Channel ch{mod_input, {mod_f, "F"}, {"Sp", "Sm"}, {"Cp", "Cm"}};
                net = crn::synth_modulator(ch, {"M_p", "M_m"},
                                           mod_rate > 0.0 ? mod_rate : 100.0 * mod_f);
            } else if (*synth_mux) {
                std::vector<crn::Channel> channels;
                double fmax = 0.0;
                for (const auto& spec : mux_channels) {
                    auto colon = spec.find(':');
                    double f = 0.0;
                    if (colon == std::string::npos ||
                        !crn::parse_double(spec.substr(colon + 1), f))
                        throw std::runtime_error("bad channel spec '" + spec + "' (NAME:FREQ)");
                    channels.push_back(crn::make_channel(spec.substr(0, colon), f));
                    fmax = std::max(fmax, f);
                }
                std::vector<std::string> warnings;
                net = crn::synth_multiplexer(channels, {"M_p", "M_m"},
                                             mux_rate > 0.0 ? mux_rate : 100.0 * fmax, &warnings);
                for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
            } else if (*synth_dem) {
                auto comma = dem_medium.find(',');
                if (comma == std::string::npos)
                    throw std::runtime_error("--medium must be PLUS,MINUS");
                crn::DualRail medium{dem_medium.substr(0, comma), dem_medium.substr(comma + 1)};
                net = crn::synth_demodulator(dem_spec, medium, dem_output);
            }
            write_network(net, synth_format, synth_out);
            return 0;
        }

        if (*cmd_bode) {
            crn::Network net = load_network(bode_file);
            crn::SignalRef input = make_signal_ref(bode_in, bode_in_rail);
            crn::SignalRef output = make_signal_ref(bode_out_sp, bode_out_rail);
            if (bode_points < 1) throw std::runtime_error("--points must be >= 1");
            if (!(bode_wmin > 0.0) || !(bode_wmax >= bode_wmin))
                throw std::runtime_error("need 0 < w-min <= w-max");
            std::vector<double> omegas;
            for (int i = 0; i < bode_points; ++i) {
                double t = bode_points == 1 ? 0.0
                                            : static_cast<double>(i) / (bode_points - 1);
                omegas.push_back(bode_wmin * std::pow(bode_wmax / bode_wmin, t));
            }
            crn::MeasureOptions opts;
            opts.amplitude = bode_amp;
            opts.settle_tau = bode_settle;
            opts.sim = sim;
            std::vector<crn::SweepError> errors;
            auto points = crn::bode_sweep(net, input, output, omegas, opts, &errors);
            for (const auto& e : errors)
                std::cerr << "warning: omega=" << crn::format_double(e.omega) << ": " << e.message
                          << '\n';
            std::ofstream os(bode_csv, std::ios::binary);
            if (!os) throw std::runtime_error("cannot write '" + bode_csv + "'");
            os << "omega,gain_db,phase_rad\n";
            for (const auto& p : points)
                os << crn::format_double(p.omega) << ',' << crn::format_double(p.gain_db) << ','
                   << crn::format_double(p.phase) << '\n';
            if (!bode_svg.empty()) {
                std::ofstream svg(bode_svg, std::ios::binary);
                if (!svg) throw std::runtime_error("cannot write '" + bode_svg + "'");
                crn::write_bode_svg(svg, points);
            }
            return 0;
        }

        if (*cmd_modem) {
            auto cfg = crn::experiment_from_json(nlohmann::json::parse(read_file(modem_config)));
            cfg.sim = sim;
            crn::ExperimentReport report = crn::run_modem_experiment(cfg);
            for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
            report.write(modem_dir);
            std::cout << report.metrics_json().dump(2) << '\n';
            return 0;
        }

        if (*cmd_mon) {
            crn::Network net = load_network(mon_file);
            crn::BandSpec band{mon_low, mon_high, mon_stop};
            crn::MonitorResult res = crn::band_monitor(net, mon_species, band, mon_window, sim);
            switch (res.verdict) {
                case crn::BandVerdict::in_band:
                    std::cout << "in_band measured_omega=" << crn::format_double(res.measured_omega)
                              << " ratio_db=" << crn::format_double(res.ratio_db) << '\n';
                    return 0;
                case crn::BandVerdict::out_of_band:
                    std::cout << "out_of_band measured_omega="
                              << crn::format_double(res.measured_omega)
                              << " ratio_db=" << crn::format_double(res.ratio_db) << '\n';
                    return 1;
                case crn::BandVerdict::no_oscillation:
                    std::cout << "no_oscillation\n";
                    return 2;
            }
        }
    } catch (const crn::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kErrorExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kErrorExit;
    }
    return 0;
}
