#include "rdmass/system.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rdmass/errors.hpp"

namespace rdmass {

namespace {

constexpr double kSignTol = 1e-12;
constexpr int kMaxWitnesses = 8;

// Per-coordinate log-uniform sampling on [1e-6, 1e3]; covers both the
// small-concentration and large-concentration regimes where sign violations
// hide.
double log_uniform(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> expo(-6.0, 3.0);
    return std::pow(10.0, expo(rng));
}

// Deterministic corner probes: the origin, unit axis points, and far axis
// points. Checked before any random sampling so refutation witnesses are
// reproducible and human-readable.
std::vector<std::vector<double>> corner_probes(int m) {
    std::vector<std::vector<double>> probes;
    probes.emplace_back(m, 0.0);
    for (int j = 0; j < m; ++j) {
        std::vector<double> unit(m, 0.0), far(m, 0.0);
        unit[j] = 1.0;
        far[j] = 1e3;
        probes.push_back(std::move(unit));
        probes.push_back(std::move(far));
    }
    probes.emplace_back(m, 1.0);
    return probes;
}

} // namespace

const char* to_string(BalanceClass c) {
    switch (c) {
        case BalanceClass::conservative: return "conservative";
        case BalanceClass::dissipative: return "dissipative";
        default: return "unknown";
    }
}

const char* to_string(CheckVerdict v) {
    switch (v) {
        case CheckVerdict::certified: return "certified";
        case CheckVerdict::refuted: return "refuted";
        default: return "inconclusive";
    }
}

const char* to_string(CheckMethod m) {
    switch (m) {
        case CheckMethod::symbolic: return "symbolic";
        case CheckMethod::structural: return "structural";
        default: return "sampled";
    }
}

double SystemSpec::d_max() const { return *std::max_element(d.begin(), d.end()); }
double SystemSpec::d_min() const { return *std::min_element(d.begin(), d.end()); }

bool SystemSpec::equal_diffusion() const {
    return std::all_of(d.begin(), d.end(), [&](double di) { return di == d[0]; });
}

SystemSpec make_system(std::vector<double> d, PolynomialVectorField field,
                       BalanceClass balance_class, std::vector<double> weights) {
    const int m = field.species_count();
    if (static_cast<int>(d.size()) != m)
        throw ArgumentError("need one diffusion coefficient per species");
    for (int i = 0; i < m; ++i)
        if (!(d[i] > 0.0) || !std::isfinite(d[i]))
            throw ArgumentError("diffusion coefficient d_" + std::to_string(i + 1) +
                                " must be strictly positive");
    if (!weights.empty()) {
        if (static_cast<int>(weights.size()) != m)
            throw ArgumentError("need one weight per species");
        for (int i = 0; i < m; ++i)
            if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
                throw ArgumentError("weight " + std::to_string(i + 1) +
                                    " must be strictly positive");
    }
    return SystemSpec{m, std::move(d), std::move(field), balance_class, std::move(weights)};
}

double eval_terms(std::span<const Term> terms, std::span<const double> u) {
    double acc = 0.0;
    for (const Term& t : terms) {
        double p = t.coefficient;
        for (size_t j = 0; j < t.exponents.size(); ++j) {
            for (int k = 0; k < t.exponents[j]; ++k) p *= u[j];
        }
        acc += p;
    }
    return acc;
}

CheckerReport check_quasi_positivity(const PolynomialVectorField& field, int sample_count,
                                     std::uint64_t seed) {
    if (sample_count < 1) throw ArgumentError("sample_count must be at least 1");
    const int m = field.species_count();

    bool structural = true;
    for (int i = 0; i < m && structural; ++i)
        for (const Term& t : field.component(i))
            if (t.coefficient < 0.0 && t.exponents[i] < 1) {
                structural = false;
                break;
            }
    if (structural) {
        CheckerReport report;
        report.verdict = CheckVerdict::certified;
        report.method = CheckMethod::structural;
        report.note = "every negatively-signed term of f_i contains the factor u_i";
        return report;
    }

    CheckerReport report;
    report.method = CheckMethod::sampled;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < m; ++i) {
        auto try_point = [&](std::vector<double> u) {
            u[i] = 0.0;
            const double v = eval_terms(field.component(i), u);
            if (v < -kSignTol && static_cast<int>(report.witnesses.size()) < kMaxWitnesses)
                report.witnesses.push_back({std::move(u), v, i});
        };
        for (const auto& probe : corner_probes(m)) try_point(probe);
        for (int s = 0; s < sample_count; ++s) {
            std::vector<double> u(m);
            for (int j = 0; j < m; ++j) u[j] = log_uniform(rng);
            try_point(std::move(u));
        }
    }
    if (!report.witnesses.empty()) {
        report.verdict = CheckVerdict::refuted;
        report.note = "component goes negative on its zero face";
    } else {
        report.verdict = CheckVerdict::inconclusive;
        report.note = "no face violation found by sampling; structural test not met";
    }
    return report;
}

MassBalanceReport check_mass_balance(const PolynomialVectorField& field,
                                     std::span<const double> weights, int sample_count,
                                     std::uint64_t seed) {
    if (sample_count < 1) throw ArgumentError("sample_count must be at least 1");
    if (!weights.empty()) {
        if (static_cast<int>(weights.size()) != field.species_count())
            throw ArgumentError("need one weight per species");
        for (double w : weights)
            if (!(w > 0.0)) throw ArgumentError("weights must be strictly positive");
    }
    const int m = field.species_count();
    const std::vector<Term> sum = field.weighted_component_sum(weights);

    MassBalanceReport report;
    if (sum.empty()) {
        report.verdict = CheckVerdict::certified;
        report.method = CheckMethod::symbolic;
        report.balance_class = BalanceClass::conservative;
        report.note = "weighted component sum cancels identically";
        return report;
    }

    report.method = CheckMethod::sampled;
    std::mt19937_64 rng(seed);
    auto try_point = [&](std::vector<double> u) {
        const double v = eval_terms(sum, u);
        if (v > kSignTol && static_cast<int>(report.witnesses.size()) < kMaxWitnesses)
            report.witnesses.push_back({std::move(u), v, -1});
    };
    for (const auto& probe : corner_probes(m)) try_point(probe);
    for (int s = 0; s < sample_count; ++s) {
        std::vector<double> u(m);
        for (int j = 0; j < m; ++j) u[j] = log_uniform(rng);
        try_point(std::move(u));
    }

    if (!report.witnesses.empty()) {
        report.verdict = CheckVerdict::refuted;
        report.balance_class = BalanceClass::unknown;
        report.note = "weighted component sum takes positive values on the orthant";
    } else {
        report.verdict = CheckVerdict::inconclusive;
        report.balance_class = BalanceClass::dissipative;
        report.note = "nonpositive at every sampled point (sampled evidence, not a proof)";
    }
    return report;
}

GrowthReport growth_degree(const PolynomialVectorField& field) {
    GrowthReport report;
    report.max_total_degree = field.max_total_degree();
    report.at_most_quadratic = report.max_total_degree <= 2;
    return report;
}

SystemSpec augment(const SystemSpec& system) {
    if (system.balance_class != BalanceClass::conservative &&
        system.balance_class != BalanceClass::dissipative)
        throw ArgumentError("augment requires a conservative or dissipative balance class");

    const int m = system.m;
    PolynomialVectorField wide = system.field.widened(m + 1);
    std::vector<Term> absorb = system.field.weighted_component_sum();
    for (Term& t : absorb) {
        t.coefficient = -t.coefficient;
        t.exponents.resize(m + 1, 0);
    }
    auto comps = wide.components();
    comps.back() = std::move(absorb);

    std::vector<double> d = system.d;
    d.push_back(1.0);
    return make_system(std::move(d), PolynomialVectorField(m + 1, std::move(comps)),
                       BalanceClass::conservative);
}

SystemSpec builtin_reversible(double k_f, double k_b, std::vector<double> d) {
    if (!(k_f > 0.0) || !(k_b > 0.0))
        throw ArgumentError("reversible reaction rates must be positive");
    if (d.size() != 4) throw ArgumentError("reversible reaction has 4 species");

    const std::vector<int> fwd{1, 1, 0, 0}, bwd{0, 0, 1, 1};
    std::vector<std::vector<Term>> comps(4);
    for (int i : {0, 1}) comps[i] = {{-k_f, fwd}, {k_b, bwd}};
    for (int i : {2, 3}) comps[i] = {{k_f, fwd}, {-k_b, bwd}};
    return make_system(std::move(d), PolynomialVectorField(4, std::move(comps)),
                       BalanceClass::conservative);
}

SystemSpec builtin_lotka_volterra(std::vector<double> tau, const std::vector<double>& a_rowmajor,
                                  std::vector<double> d) {
    const int m = static_cast<int>(tau.size());
    if (m < 1) throw ArgumentError("need at least one species");
    if (static_cast<int>(a_rowmajor.size()) != m * m)
        throw ArgumentError("interaction matrix must be m x m");
    if (static_cast<int>(d.size()) != m)
        throw ArgumentError("need one diffusion coefficient per species");

    for (int i = 0; i < m; ++i)
        if (tau[i] < 0.0 || !std::isfinite(tau[i]))
            throw ArgumentError("tau_" + std::to_string(i + 1) + " must be nonnegative");
    bool symmetric_part_zero = true;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const double s = a_rowmajor[i * m + j] + a_rowmajor[j * m + i];
            if (s > 0.0)
                throw ArgumentError("A + A^T has positive entry (" + std::to_string(i + 1) + "," +
                                    std::to_string(j + 1) + ")");
            if (s != 0.0) symmetric_part_zero = false;
        }

    std::vector<std::vector<Term>> comps(m);
    bool all_tau_zero = true;
    for (int i = 0; i < m; ++i) {
        if (tau[i] != 0.0) {
            all_tau_zero = false;
            std::vector<int> e(m, 0);
            e[i] = 1;
            comps[i].push_back({-tau[i], std::move(e)});
        }
        for (int j = 0; j < m; ++j) {
            if (a_rowmajor[i * m + j] == 0.0) continue;
            std::vector<int> e(m, 0);
            e[i] += 1;
            e[j] += 1;
            comps[i].push_back({a_rowmajor[i * m + j], std::move(e)});
        }
    }
    const BalanceClass cls = (all_tau_zero && symmetric_part_zero) ? BalanceClass::conservative
                                                                   : BalanceClass::dissipative;
    return make_system(std::move(d), PolynomialVectorField(m, std::move(comps)), cls);
}

} // namespace rdmass
