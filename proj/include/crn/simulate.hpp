#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "crn/errors.hpp"
#include "crn/network.hpp"
#include "crn/numfmt.hpp"
#include "crn/ode.hpp"

namespace crn {

struct SimControl {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = std::numeric_limits<double>::infinity();
    std::uint64_t max_steps = 200'000'000;
};

/// Time-stamped concentration samples, one column per species in network
/// order. Also records the integrator tolerances that produced it.
struct Trace {
    std::vector<std::string> species;
    std::vector<double> times;
    std::vector<std::vector<double>> states;  // one row per time
    double rel_tol = 0.0;
    double abs_tol = 0.0;

    std::size_t index_of(const std::string& name) const {
        for (std::size_t i = 0; i < species.size(); ++i)
            if (species[i] == name) return i;
        throw NetworkError("trace has no species '" + name + "'");
    }

    std::vector<double> column(const std::string& name) const {
        std::size_t idx = index_of(name);
        std::vector<double> out(times.size());
        for (std::size_t r = 0; r < times.size(); ++r) out[r] = states[r][idx];
        return out;
    }

    /// Logical value of a dual-rail pair: plus minus minus, per row.
    std::vector<double> difference(const DualRail& rail) const {
        std::size_t p = index_of(rail.plus);
        std::size_t m = index_of(rail.minus);
        std::vector<double> out(times.size());
        for (std::size_t r = 0; r < times.size(); ++r) out[r] = states[r][p] - states[r][m];
        return out;
    }

    /// CSV with header `t,<species...>`; values round-trip exactly.
    void write_csv(std::ostream& os) const {
        os << 't';
        for (const auto& s : species) os << ',' << s;
        os << '\n';
        for (std::size_t r = 0; r < times.size(); ++r) {
            os << format_double(times[r]);
            for (double v : states[r]) os << ',' << format_double(v);
            os << '\n';
        }
    }
};

/// Externally forced concentration as a function of time. Driven species are
/// excluded from the integrated state; every right-hand-side evaluation sees
/// their instantaneous value.
using DriveFn = std::function<double(double)>;
using DriveMap = std::map<std::string, DriveFn>;

namespace detail {

// Dormand-Prince 5(4) embedded pair with FSAL. The fifth-order solution is
// propagated; the embedded difference drives the step controller.
struct Dopri5Tableau {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b - bhat, for the embedded fourth-order error estimate
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

class MassActionIvp {
public:
    MassActionIvp(const Network& net, const DriveMap& drives) : system_(compile_odes(net)) {
        const auto& species = net.species();
        slot_.resize(species.size());
        for (std::size_t i = 0; i < species.size(); ++i) {
            auto it = drives.find(species[i].name);
            if (it != drives.end()) {
                slot_[i] = -1;
                driven_.emplace_back(i, it->second);
            } else {
                slot_[i] = static_cast<int>(free_index_.size());
                free_index_.push_back(i);
            }
        }
        for (const auto& [name, fn] : drives)
            if (!net.has_species(name)) throw NetworkError("driven species '" + name + "' not in network");
        full_.resize(species.size());
        dfull_.resize(species.size());
        auto init = net.initial_state();
        y0_.resize(free_index_.size());
        for (std::size_t i = 0; i < free_index_.size(); ++i) y0_[i] = init[free_index_[i]];
    }

    std::size_t dim() const { return free_index_.size(); }
    const std::vector<double>& initial() const { return y0_; }

    void rhs(double t, const std::vector<double>& y, std::vector<double>& dy) {
        assemble(t, y);
        system_.evaluate_into(full_.data(), dfull_.data());
        for (std::size_t i = 0; i < free_index_.size(); ++i) dy[i] = dfull_[free_index_[i]];
    }

    /// Full concentration vector (free + driven) at time t.
    void full_state(double t, const std::vector<double>& y, std::vector<double>& out) {
        assemble(t, y);
        out = full_;
    }

private:
    void assemble(double t, const std::vector<double>& y) {
        for (std::size_t i = 0; i < free_index_.size(); ++i) full_[free_index_[i]] = y[i];
        for (const auto& [idx, fn] : driven_) full_[idx] = fn(t);
    }

    OdeSystem system_;
    std::vector<int> slot_;
    std::vector<std::size_t> free_index_;
    std::vector<std::pair<std::size_t, DriveFn>> driven_;
    std::vector<double> full_, dfull_, y0_;
};

inline double hermite(double theta, double h, double y0, double f0, double y1, double f1) {
    double t2 = theta * theta, t3 = t2 * theta;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + theta) * h * f0 +
           (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * f1;
}

class Dopri5 {
public:
    Dopri5(MassActionIvp& ivp, const SimControl& ctrl) : ivp_(ivp), ctrl_(ctrl) {
        if (!(ctrl.rel_tol > 0.0) || !(ctrl.abs_tol > 0.0))
            throw SimulationError("tolerances must be positive");
        n_ = ivp.dim();
        y_ = ivp.initial();
        for (auto& k : k_) k.resize(n_);
        ytmp_.resize(n_);
        ynew_.resize(n_);
        if (n_ > 0) ivp_.rhs(0.0, y_, k_[0]);
        check_finite(k_[0], 0.0);
        eps_neg_ = 10.0 * ctrl.abs_tol;
    }

    double t() const { return t_; }
    const std::vector<double>& y() const { return y_; }
    const std::vector<double>& f() const { return k_[0]; }
    double step_size() const { return h_; }

    /// Advances one accepted step toward t_end; on return, [t_prev, t] with
    /// (y_prev, f_prev) and (y, f) brackets the step for dense output.
    void step(double t_end) {
        using T = Dopri5Tableau;
        if (h_ == 0.0) h_ = initial_step(t_end);
        for (;;) {
            if (++total_steps_ > ctrl_.max_steps)
                throw SimulationError("integration exceeded max_steps");
            h_ = std::min(h_, ctrl_.max_step);
            bool last = h_ >= t_end - t_;
            if (last) h_ = t_end - t_;
            if (h_ <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t_), 1.0))
                throw SimulationError("step size underflow at t=" + format_double(t_) +
                                      " (system too stiff for this integrator)");
            const double h = h_;

            for (std::size_t i = 0; i < n_; ++i) ytmp_[i] = y_[i] + h * T::a21 * k_[0][i];
            ivp_.rhs(t_ + T::c2 * h, ytmp_, k_[1]);
            stage(h, {{T::a31, 0}, {T::a32, 1}});
            ivp_.rhs(t_ + T::c3 * h, ytmp_, k_[2]);
            stage(h, {{T::a41, 0}, {T::a42, 1}, {T::a43, 2}});
            ivp_.rhs(t_ + T::c4 * h, ytmp_, k_[3]);
            stage(h, {{T::a51, 0}, {T::a52, 1}, {T::a53, 2}, {T::a54, 3}});
            ivp_.rhs(t_ + T::c5 * h, ytmp_, k_[4]);
            stage(h, {{T::a61, 0}, {T::a62, 1}, {T::a63, 2}, {T::a64, 3}, {T::a65, 4}});
            ivp_.rhs(t_ + h, ytmp_, k_[5]);
            for (std::size_t i = 0; i < n_; ++i)
                ynew_[i] = y_[i] + h * (T::b1 * k_[0][i] + T::b3 * k_[2][i] + T::b4 * k_[3][i] +
                                        T::b5 * k_[4][i] + T::b6 * k_[5][i]);
            ivp_.rhs(t_ + h, ynew_, k_[6]);

            double err = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                double e = h * (T::e1 * k_[0][i] + T::e3 * k_[2][i] + T::e4 * k_[3][i] +
                                T::e5 * k_[4][i] + T::e6 * k_[5][i] + T::e7 * k_[6][i]);
                double scale =
                    ctrl_.abs_tol + ctrl_.rel_tol * std::max(std::abs(y_[i]), std::abs(ynew_[i]));
                err += (e / scale) * (e / scale);
            }
            err = n_ > 0 ? std::sqrt(err / static_cast<double>(n_)) : 0.0;

            if (err <= 1.0) {
                t_prev_ = t_;
                y_prev_ = y_;
                f_prev_ = k_[0];
                t_ = last ? t_end : t_ + h;
                // Integration drift may leave tiny negative concentrations;
                // clamp them so mass-action rates stay meaningful.
                bool clamped = false;
                for (std::size_t i = 0; i < n_; ++i)
                    if (ynew_[i] < 0.0 && ynew_[i] >= -eps_neg_) {
                        ynew_[i] = 0.0;
                        clamped = true;
                    }
                y_ = ynew_;
                if (clamped)
                    ivp_.rhs(t_, y_, k_[6]);  // keep FSAL derivative consistent
                check_finite(y_, t_);
                check_finite(k_[6], t_);
                k_[0] = k_[6];
                double factor = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
                h_ = h * std::clamp(factor, 0.2, rejected_ ? 1.0 : 5.0);
                rejected_ = false;
                return;
            }
            rejected_ = true;
            h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 1.0);
        }
    }

    double prev_t() const { return t_prev_; }

    /// Fifth-order-step interiors via cubic Hermite between accepted points.
    double interpolate(double ts, std::size_t i) const {
        double h = t_ - t_prev_;
        double theta = h > 0.0 ? (ts - t_prev_) / h : 0.0;
        return hermite(theta, h, y_prev_[i], f_prev_[i], y_[i], k_[0][i]);
    }

    void interpolate_all(double ts, std::vector<double>& out) const {
        out.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) out[i] = interpolate(ts, i);
    }

private:
    void stage(double h, std::initializer_list<std::pair<double, int>> terms) {
        for (std::size_t i = 0; i < n_; ++i) {
            double acc = 0.0;
            for (const auto& [a, k] : terms) acc += a * k_[k][i];
            ytmp_[i] = y_[i] + h * acc;
        }
    }

    void check_finite(const std::vector<double>& v, double at) const {
        for (double x : v)
            if (!std::isfinite(x))
                throw SimulationError("non-finite state at t=" + format_double(at));
    }

    // Hairer-style starting step: small Euler probe of the local curvature.
    double initial_step(double t_end) {
        if (n_ == 0) return t_end;
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            double scale = ctrl_.abs_tol + ctrl_.rel_tol * std::abs(y_[i]);
            d0 += (y_[i] / scale) * (y_[i] / scale);
            d1 += (k_[0][i] / scale) * (k_[0][i] / scale);
        }
        d0 = std::sqrt(d0 / static_cast<double>(n_));
        d1 = std::sqrt(d1 / static_cast<double>(n_));
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, t_end);
        std::vector<double> y1(n_), f1(n_);
        for (std::size_t i = 0; i < n_; ++i) y1[i] = y_[i] + h0 * k_[0][i];
        ivp_.rhs(h0, y1, f1);
        double d2 = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            double scale = ctrl_.abs_tol + ctrl_.rel_tol * std::abs(y_[i]);
            double diff = (f1[i] - k_[0][i]) / scale;
            d2 += diff * diff;
        }
        d2 = std::sqrt(d2 / static_cast<double>(n_)) / h0;
        double dm = std::max(d1, d2);
        double h1 = dm > 1e-15 ? std::pow(0.01 / dm, 0.2) : std::max(1e-6, h0 * 1e-3);
        return std::min({100.0 * h0, h1, t_end, ctrl_.max_step});
    }

    MassActionIvp& ivp_;
    SimControl ctrl_;
    std::size_t n_ = 0;
    double t_ = 0.0, t_prev_ = 0.0, h_ = 0.0, eps_neg_ = 0.0;
    bool rejected_ = false;
    std::uint64_t total_steps_ = 0;
    std::vector<double> y_, y_prev_, f_prev_, ytmp_, ynew_;
    std::vector<double> k_[7];
};

inline Trace run_simulation(const Network& net, double t_end, const SimControl& ctrl,
                            const DriveMap& drives, const std::vector<double>* grid) {
    if (!(t_end > 0.0)) throw SimulationError("t_end must be positive");
    MassActionIvp ivp(net, drives);
    Dopri5 stepper(ivp, ctrl);

    Trace trace;
    for (const auto& s : net.species()) trace.species.push_back(s.name);
    trace.rel_tol = ctrl.rel_tol;
    trace.abs_tol = ctrl.abs_tol;

    std::vector<double> row, free_state;
    auto emit = [&](double t, const std::vector<double>& free) {
        ivp.full_state(t, free, row);
        trace.times.push_back(t);
        trace.states.push_back(row);
    };

    std::size_t next = 0;
    if (grid) {
        if (grid->empty()) throw SimulationError("empty sample grid");
        if (grid->front() == 0.0) {
            emit(0.0, stepper.y());
            next = 1;
        }
    } else {
        emit(0.0, stepper.y());
    }

    while (stepper.t() < t_end) {
        stepper.step(t_end);
        if (grid) {
            while (next < grid->size() && (*grid)[next] <= stepper.t() + 1e-12 * t_end) {
                double ts = std::min((*grid)[next], stepper.t());
                stepper.interpolate_all(ts, free_state);
                emit(ts, free_state);
                ++next;
            }
        } else {
            emit(stepper.t(), stepper.y());
        }
    }
    return trace;
}

}  // namespace detail

/// Integrates the network's mass-action ODEs from its initial concentrations,
/// sampling at each accepted integrator step.
inline Trace simulate(const Network& net, double t_end, const SimControl& ctrl = {},
                      const DriveMap& drives = {}) {
    return detail::run_simulation(net, t_end, ctrl, drives, nullptr);
}

/// Same, but sampled on the uniform grid 0, dt, 2dt, ..., t_end (dense output
/// by cubic Hermite interpolation between accepted steps).
inline Trace simulate_grid(const Network& net, double t_end, double dt,
                           const SimControl& ctrl = {}, const DriveMap& drives = {}) {
    if (!(dt > 0.0)) throw SimulationError("sample step must be positive");
    std::vector<double> grid;
    std::size_t count = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
    grid.reserve(count + 2);
    for (std::size_t i = 0; i <= count; ++i) grid.push_back(static_cast<double>(i) * dt);
    if (grid.back() < t_end - 1e-12 * t_end) grid.push_back(t_end);
    return detail::run_simulation(net, t_end, ctrl, drives, &grid);
}

}  // namespace crn
