#include "rdmass/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "rdmass/errors.hpp"

namespace rdmass {

namespace {

double max_linf(const MetricRecord& r) {
    return *std::max_element(r.linf.begin(), r.linf.end());
}

void fmt(std::ofstream& os, double x, bool lead_comma = true) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    if (lead_comma) os << ',';
    os << buf;
}

} // namespace

const char* to_string(VerdictOutcome v) {
    switch (v) {
        case VerdictOutcome::pass: return "pass";
        case VerdictOutcome::fail: return "fail";
        case VerdictOutcome::not_applicable: return "not_applicable";
        default: return "inconclusive";
    }
}

bool Verdicts::any_failed() const {
    for (const VerdictEntry* e : {&mass_bound, &mass_monotone, &equal_diffusion_max_principle,
                                  &uniform_in_time, &window_l2_bounded, &time_integral_sup_bounded})
        if (e->outcome == VerdictOutcome::fail) return true;
    return false;
}

Monitor::Monitor(MonitorConfig cfg, std::span<const double> weights)
    : cfg_(cfg), weights_(weights.begin(), weights.end()) {
    if (!(cfg_.window > 0.0)) throw ArgumentError("window width must be positive");
    if (cfg_.record_every < 1) throw ArgumentError("record_every must be at least 1");
}

void Monitor::open_window(const State& state) {
    const int m = state.m();
    l2sq_integral_.assign(m, 0.0);
    time_integral_.assign(m, std::vector<double>(state.domain().cells(), 0.0));
    sup_linf_window_ = max_linf(records_.back());
    prev_ = state;
    prev_l2_.resize(m);
    for (int i = 0; i < m; ++i) prev_l2_[i] = lp_norm(state.species[i], 2.0);
}

void Monitor::close_window() {
    WindowAggregate agg;
    agg.tau = tau_;
    agg.window_sup_linf = sup_linf_window_;
    for (size_t i = 0; i < l2sq_integral_.size(); ++i) {
        agg.window_l2.push_back(std::sqrt(std::max(0.0, l2sq_integral_[i])));
        double sup = 0.0;
        for (double v : time_integral_[i]) sup = std::max(sup, std::abs(v));
        agg.time_integral_sup.push_back(sup);
    }
    windows_.push_back(std::move(agg));
}

void Monitor::record(const State& state, double clamped_mass_cumulative) {
    if (!all_finite(state))
        throw BlowupError("non-finite field value at record time", state.t);
    if (!records_.empty() && !(state.t > records_.back().t))
        throw ArgumentError("record times must be strictly increasing");

    const int m = state.m();
    MetricRecord rec;
    rec.t = state.t;
    rec.clamped_mass_cumulative = clamped_mass_cumulative;
    rec.min_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
        rec.l1.push_back(lp_norm(state.species[i], 1.0));
        rec.linf.push_back(field_max_abs(state.species[i]));
        rec.min_value = std::min(rec.min_value, field_min(state.species[i]));
    }
    rec.total_weighted_mass = total_mass(state, weights_).total;
    records_.push_back(std::move(rec));
    sum_linf_.push_back(field_max_abs(species_sum(state)));

    if (!window_open_) {
        window_index_ = 0;
        start_t_ = state.t;
        tau_ = state.t;
        open_window(state);
        window_open_ = true;
        return;
    }

    // Trapezoidal accumulation from the previous record.
    const double dt = state.t - prev_.t;
    for (int i = 0; i < m; ++i) {
        const double cur = lp_norm(state.species[i], 2.0);
        l2sq_integral_[i] += 0.5 * dt * (prev_l2_[i] * prev_l2_[i] + cur * cur);
        prev_l2_[i] = cur;
        const auto& pv = prev_.species[i].v;
        const auto& cv = state.species[i].v;
        auto& acc = time_integral_[i];
        for (size_t k = 0; k < acc.size(); ++k) acc[k] += 0.5 * dt * (pv[k] + cv[k]);
    }
    sup_linf_window_ = std::max(sup_linf_window_, max_linf(records_.back()));
    prev_ = state;

    const double boundary = start_t_ + (window_index_ + 1) * cfg_.window;
    if (state.t >= boundary - 1e-9 * std::max(1.0, cfg_.window)) {
        close_window();
        ++window_index_;
        tau_ = start_t_ + window_index_ * cfg_.window;
        open_window(state);
    }
}

Verdicts issue_verdicts(const Monitor& monitor, BalanceClass balance_class,
                        bool equal_diffusion) {
    const auto& recs = monitor.records();
    const auto& wins = monitor.windows();
    if (recs.empty()) throw ArgumentError("verdicts need at least one record");

    Verdicts v;
    const MetricRecord& first = recs.front();
    const double scale = max_linf(first);

    // Total L1 stays below its initial value (plus clamp accounting).
    {
        double l1_0 = 0.0;
        for (double x : first.l1) l1_0 += x;
        const double threshold = l1_0 * (1.0 + 1e-8);
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& r : recs) {
            double l1 = 0.0;
            for (double x : r.l1) l1 += x;
            worst = std::max(worst, l1 - r.clamped_mass_cumulative);
        }
        v.mass_bound = {worst <= threshold ? VerdictOutcome::pass : VerdictOutcome::fail, worst,
                        threshold, "max_t sum_i ||u_i||_1 vs initial"};
    }

    // Weighted total mass non-increasing between records.
    if (balance_class == BalanceClass::conservative || balance_class == BalanceClass::dissipative) {
        double worst = 0.0;
        for (size_t k = 0; k + 1 < recs.size(); ++k) {
            const double dclamp =
                recs[k + 1].clamped_mass_cumulative - recs[k].clamped_mass_cumulative;
            const double rise = recs[k + 1].total_weighted_mass - recs[k].total_weighted_mass -
                                dclamp - 1e-10 * std::abs(recs[k].total_weighted_mass);
            worst = std::max(worst, rise);
        }
        v.mass_monotone = {worst <= 0.0 ? VerdictOutcome::pass : VerdictOutcome::fail, worst, 0.0,
                           "max inter-record mass rise beyond clamp accounting"};
    } else {
        v.mass_monotone = {VerdictOutcome::not_applicable, 0.0, 0.0,
                           "balance class neither conservative nor dissipative"};
    }

    // ||sum_i u_i||_inf bounded by its initial value when diffusion is equal.
    if (equal_diffusion) {
        const auto& series = monitor.sum_linf_series();
        const double threshold = series.front() * (1.0 + 1e-8);
        const double worst = *std::max_element(series.begin(), series.end());
        v.equal_diffusion_max_principle = {
            worst <= threshold ? VerdictOutcome::pass : VerdictOutcome::fail, worst, threshold,
            "max_t ||sum u_i||_inf vs initial"};
    } else {
        v.equal_diffusion_max_principle = {VerdictOutcome::not_applicable, 0.0, 0.0,
                                           "diffusion coefficients differ"};
    }

    // Two-half trend tests over the window aggregates.
    auto trend = [&](auto&& value_of, const char* what) -> VerdictEntry {
        if (wins.size() < 4)
            return {VerdictOutcome::inconclusive, 0.0, 0.0,
                    std::string(what) + ": fewer than 4 complete windows"};
        const size_t half = wins.size() / 2;
        double first_max = 0.0, second_max = 0.0;
        for (size_t k = 0; k < wins.size(); ++k) {
            const double val = value_of(wins[k]);
            (k < half ? first_max : second_max) = std::max(k < half ? first_max : second_max, val);
        }
        const double threshold = first_max + 1e-6 * scale;
        return {second_max <= threshold ? VerdictOutcome::pass : VerdictOutcome::fail, second_max,
                threshold, std::string(what) + ": second-half max vs first-half max"};
    };

    v.uniform_in_time = trend([](const WindowAggregate& w) { return w.window_sup_linf; },
                              "window sup of ||u_i||_inf");
    v.window_l2_bounded = trend(
        [](const WindowAggregate& w) {
            return *std::max_element(w.window_l2.begin(), w.window_l2.end());
        },
        "windowed space-time L2");
    v.time_integral_sup_bounded = trend(
        [](const WindowAggregate& w) {
            return *std::max_element(w.time_integral_sup.begin(), w.time_integral_sup.end());
        },
        "sup of windowed time integral");
    return v;
}

void write_metrics_csv(const std::string& path, const Monitor& monitor) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("cannot open metrics CSV for writing: " + path);
    const int m = monitor.records().empty() ? 0 : static_cast<int>(monitor.records()[0].l1.size());
    os << "t";
    for (int i = 1; i <= m; ++i) os << ",L1_" << i;
    for (int i = 1; i <= m; ++i) os << ",Linf_" << i;
    os << ",total_mass,min_value,clamped\n";
    for (const auto& r : monitor.records()) {
        fmt(os, r.t, false);
        for (double x : r.l1) fmt(os, x);
        for (double x : r.linf) fmt(os, x);
        fmt(os, r.total_weighted_mass);
        fmt(os, r.min_value);
        fmt(os, r.clamped_mass_cumulative);
        os << '\n';
    }
    if (!os) throw IoError("metrics CSV write failed: " + path);
}

void write_windows_csv(const std::string& path, const Monitor& monitor) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("cannot open windows CSV for writing: " + path);
    const int m =
        monitor.windows().empty() ? 0 : static_cast<int>(monitor.windows()[0].window_l2.size());
    os << "tau";
    for (int i = 1; i <= m; ++i) os << ",window_l2_" << i;
    for (int i = 1; i <= m; ++i) os << ",time_integral_sup_" << i;
    os << ",window_sup_linf\n";
    for (const auto& w : monitor.windows()) {
        fmt(os, w.tau, false);
        for (double x : w.window_l2) fmt(os, x);
        for (double x : w.time_integral_sup) fmt(os, x);
        fmt(os, w.window_sup_linf);
        os << '\n';
    }
    if (!os) throw IoError("windows CSV write failed: " + path);
}

} // namespace rdmass
