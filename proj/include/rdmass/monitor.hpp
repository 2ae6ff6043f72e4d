#ifndef RDMASS_MONITOR_HPP
#define RDMASS_MONITOR_HPP

#include <span>
#include <string>
#include <vector>

#include "rdmass/grid.hpp"
#include "rdmass/system.hpp"

namespace rdmass {

/// Instantaneous metrics computed at one record time.
struct MetricRecord {
    double t = 0.0;
    std::vector<double> l1;   // per-species ||u_i||_1
    std::vector<double> linf; // per-species ||u_i||_inf
    double total_weighted_mass = 0.0;
    double min_value = 0.0;
    double clamped_mass_cumulative = 0.0;
};

/// Per-window aggregates over [tau, tau + w]: the space-time L2 norm of each
/// species, the sup norm of each species' time integral, and the running sup
/// of the instantaneous sup norms.
struct WindowAggregate {
    double tau = 0.0;
    std::vector<double> window_l2;
    std::vector<double> time_integral_sup;
    double window_sup_linf = 0.0;
};

enum class VerdictOutcome { pass, fail, not_applicable, inconclusive };

const char* to_string(VerdictOutcome v);

struct VerdictEntry {
    VerdictOutcome outcome = VerdictOutcome::not_applicable;
    double observed = 0.0;
    double threshold = 0.0;
    std::string note;
};

struct Verdicts {
    VerdictEntry mass_bound;
    VerdictEntry mass_monotone;
    VerdictEntry equal_diffusion_max_principle;
    VerdictEntry uniform_in_time;
    VerdictEntry window_l2_bounded;
    VerdictEntry time_integral_sup_bounded;

    bool any_failed() const;
};

struct MonitorConfig {
    double window = 1.0;   // width of the aggregation windows
    int record_every = 10; // accepted steps between records
};

/// Accumulates the metric series and window aggregates for one run.
///
/// The run loop owns the monitor and must land a record exactly on every
/// window boundary (it clips step sizes to do so); interior records may come
/// at any cadence. Time quadrature is trapezoidal between consecutive
/// records, so aggregates converge at second order in the record spacing.
class Monitor {
public:
    Monitor(MonitorConfig cfg, std::span<const double> weights = {});

    void record(const State& state, double clamped_mass_cumulative);

    double window_width() const { return cfg_.window; }
    int record_every() const { return cfg_.record_every; }
    const std::vector<MetricRecord>& records() const { return records_; }
    const std::vector<WindowAggregate>& windows() const { return windows_; }
    /// ||sum_i u_i(t)||_inf at each record (for the equal-diffusion check).
    const std::vector<double>& sum_linf_series() const { return sum_linf_; }

private:
    void open_window(const State& state);
    void close_window();

    MonitorConfig cfg_;
    std::vector<double> weights_;
    std::vector<MetricRecord> records_;
    std::vector<WindowAggregate> windows_;
    std::vector<double> sum_linf_;

    // current window state
    long window_index_ = 0;
    double start_t_ = 0.0;
    double tau_ = 0.0;
    bool window_open_ = false;
    std::vector<double> l2sq_integral_;            // per species
    std::vector<std::vector<double>> time_integral_; // per species, per cell
    double sup_linf_window_ = 0.0;
    State prev_;
    std::vector<double> prev_l2_;
};

/// Pass/fail verdicts for the monitored bounds. `balance_class` is the
/// checker-established class (it gates the monotonicity check), and
/// `equal_diffusion` gates the summed-species maximum principle.
Verdicts issue_verdicts(const Monitor& monitor, BalanceClass balance_class,
                        bool equal_diffusion);

/// Writes the metric series CSV: t, L1_1..L1_m, Linf_1..Linf_m, total_mass,
/// min_value, clamped.
void write_metrics_csv(const std::string& path, const Monitor& monitor);

/// Writes the window aggregate CSV keyed by tau.
void write_windows_csv(const std::string& path, const Monitor& monitor);

} // namespace rdmass

#endif
