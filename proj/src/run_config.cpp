#include "rdmass/run_config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "rdmass/errors.hpp"

namespace rdmass {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

void expect_object(const json& j, const std::string& where) {
    if (!j.is_object()) bad(where, "expected an object");
}

void reject_unknown_keys(const json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) {
                ok = true;
                break;
            }
        if (!ok) bad(where, "unknown key '" + key + "'");
    }
}

const json& require(const json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) bad(where, std::string("missing key '") + key + "'");
    return *it;
}

double as_number(const json& j, const std::string& where) {
    if (!j.is_number()) bad(where, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) bad(where, "expected an integer");
    return j.get<int>();
}

bool as_bool(const json& j, const std::string& where) {
    if (!j.is_boolean()) bad(where, "expected a boolean");
    return j.get<bool>();
}

std::string as_string(const json& j, const std::string& where) {
    if (!j.is_string()) bad(where, "expected a string");
    return j.get<std::string>();
}

std::uint64_t as_seed(const json& j, const std::string& where) {
    if (!j.is_number_integer() && !j.is_number_unsigned()) bad(where, "expected an integer seed");
    if (j.is_number_integer() && j.get<long long>() < 0) bad(where, "seed must be nonnegative");
    return j.get<std::uint64_t>();
}

std::vector<double> as_number_list(const json& j, const std::string& where, int expected = -1) {
    if (!j.is_array()) bad(where, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : j) out.push_back(as_number(e, where));
    if (expected >= 0 && static_cast<int>(out.size()) != expected)
        bad(where, "expected " + std::to_string(expected) + " entries, got " +
                       std::to_string(out.size()));
    return out;
}

std::vector<int> as_int_list(const json& j, const std::string& where, int expected = -1) {
    if (!j.is_array()) bad(where, "expected an array of integers");
    std::vector<int> out;
    for (const auto& e : j) out.push_back(as_int(e, where));
    if (expected >= 0 && static_cast<int>(out.size()) != expected)
        bad(where, "expected " + std::to_string(expected) + " entries, got " +
                       std::to_string(out.size()));
    return out;
}

BoxDomain parse_domain(const json& j) {
    expect_object(j, "domain");
    reject_unknown_keys(j, "domain", {"n", "L", "N"});
    const int n = as_int(require(j, "domain", "n"), "domain.n");
    if (n < 1 || n > 3) bad("domain.n", "dimension must be 1, 2 or 3");
    const auto L = as_number_list(require(j, "domain", "L"), "domain.L", n);
    const auto N = as_int_list(require(j, "domain", "N"), "domain.N", n);
    try {
        return make_box(n, L, N);
    } catch (const ArgumentError& e) {
        bad("domain", e.what());
    }
}

SystemSpec parse_system(const json& j, bool& reduce_to_conservative) {
    expect_object(j, "system");
    reduce_to_conservative = false;
    if (auto it = j.find("reduce_to_conservative"); it != j.end())
        reduce_to_conservative = as_bool(*it, "system.reduce_to_conservative");

    try {
        if (j.contains("builtin")) {
            const std::string name = as_string(j.at("builtin"), "system.builtin");
            if (name == "reversible") {
                reject_unknown_keys(j, "system",
                                    {"builtin", "k_f", "k_b", "d", "reduce_to_conservative"});
                return builtin_reversible(
                    as_number(require(j, "system", "k_f"), "system.k_f"),
                    as_number(require(j, "system", "k_b"), "system.k_b"),
                    as_number_list(require(j, "system", "d"), "system.d", 4));
            }
            if (name == "lotka_volterra") {
                reject_unknown_keys(j, "system",
                                    {"builtin", "tau", "A", "d", "reduce_to_conservative"});
                const auto tau = as_number_list(require(j, "system", "tau"), "system.tau");
                const int m = static_cast<int>(tau.size());
                const json& rows = require(j, "system", "A");
                if (!rows.is_array() || static_cast<int>(rows.size()) != m)
                    bad("system.A", "expected " + std::to_string(m) + " rows");
                std::vector<double> a;
                for (const auto& row : rows) {
                    const auto r = as_number_list(row, "system.A row", m);
                    a.insert(a.end(), r.begin(), r.end());
                }
                return builtin_lotka_volterra(
                    tau, a, as_number_list(require(j, "system", "d"), "system.d", m));
            }
            bad("system.builtin", "unknown builtin '" + name + "'");
        }

        reject_unknown_keys(
            j, "system",
            {"m", "d", "terms", "weights", "balance_class", "reduce_to_conservative"});
        const int m = as_int(require(j, "system", "m"), "system.m");
        if (m < 1) bad("system.m", "species count must be positive");
        std::vector<std::vector<Term>> comps(m);
        const json& terms = require(j, "system", "terms");
        if (!terms.is_array()) bad("system.terms", "expected an array of term records");
        int idx = 0;
        for (const auto& rec : terms) {
            const std::string where = "system.terms[" + std::to_string(idx++) + "]";
            expect_object(rec, where);
            reject_unknown_keys(rec, where, {"species", "coefficient", "exponents"});
            const int species = as_int(require(rec, where, "species"), where + ".species");
            if (species < 1 || species > m)
                bad(where + ".species", "must be between 1 and " + std::to_string(m));
            Term t;
            t.coefficient = as_number(require(rec, where, "coefficient"), where + ".coefficient");
            for (int e : as_int_list(require(rec, where, "exponents"), where + ".exponents", m)) {
                if (e < 0) bad(where + ".exponents", "exponents must be nonnegative");
                t.exponents.push_back(e);
            }
            comps[species - 1].push_back(std::move(t));
        }
        BalanceClass declared = BalanceClass::unknown;
        if (auto it = j.find("balance_class"); it != j.end()) {
            const std::string c = as_string(*it, "system.balance_class");
            if (c == "conservative")
                declared = BalanceClass::conservative;
            else if (c == "dissipative")
                declared = BalanceClass::dissipative;
            else if (c != "unknown")
                bad("system.balance_class", "expected conservative, dissipative or unknown");
        }
        std::vector<double> weights;
        if (auto it = j.find("weights"); it != j.end())
            weights = as_number_list(*it, "system.weights", m);
        return make_system(as_number_list(require(j, "system", "d"), "system.d", m),
                           PolynomialVectorField(m, std::move(comps)), declared,
                           std::move(weights));
    } catch (const ArgumentError& e) {
        bad("system", e.what());
    }
}

InitialConfig parse_initial(const json& j, int m, int n) {
    expect_object(j, "initial");
    InitialConfig init;
    const std::string type = as_string(require(j, "initial", "type"), "initial.type");
    if (type == "constant") {
        reject_unknown_keys(j, "initial", {"type", "values"});
        init.kind = InitialKind::constant;
        init.values = as_number_list(require(j, "initial", "values"), "initial.values", m);
        for (double v : init.values)
            if (!(v >= 0.0) || !std::isfinite(v))
                bad("initial.values", "initial data must be nonnegative and finite");
    } else if (type == "cosine") {
        reject_unknown_keys(j, "initial", {"type", "base", "amplitude", "mode"});
        init.kind = InitialKind::cosine;
        init.base = as_number_list(require(j, "initial", "base"), "initial.base", m);
        init.amplitude =
            as_number_list(require(j, "initial", "amplitude"), "initial.amplitude", m);
        init.mode = as_int_list(require(j, "initial", "mode"), "initial.mode", n);
        for (int i = 0; i < m; ++i)
            if (!(init.base[i] >= std::abs(init.amplitude[i])))
                bad("initial.amplitude",
                    "amplitude exceeds base; initial data must stay nonnegative");
        for (int k : init.mode)
            if (k < 0) bad("initial.mode", "modes must be nonnegative integers");
    } else if (type == "file") {
        reject_unknown_keys(j, "initial", {"type", "paths"});
        init.kind = InitialKind::file;
        const json& paths = require(j, "initial", "paths");
        if (!paths.is_array() || static_cast<int>(paths.size()) != m)
            bad("initial.paths", "expected one snapshot path per species");
        for (const auto& p : paths) {
            init.paths.push_back(as_string(p, "initial.paths"));
            if (!std::filesystem::exists(init.paths.back()))
                bad("initial.paths", "snapshot does not exist: " + init.paths.back());
        }
    } else if (type == "random") {
        reject_unknown_keys(j, "initial", {"type", "lo", "hi", "seed"});
        init.kind = InitialKind::random;
        init.lo = as_number(require(j, "initial", "lo"), "initial.lo");
        init.hi = as_number(require(j, "initial", "hi"), "initial.hi");
        if (!j.contains("seed")) bad("initial.seed", "random initial data requires a seed");
        init.seed = as_seed(j.at("seed"), "initial.seed");
        if (!(init.lo >= 0.0) || !(init.hi >= init.lo))
            bad("initial", "need 0 <= lo <= hi for nonnegative data");
    } else {
        bad("initial.type", "expected constant, cosine, file or random");
    }
    return init;
}

IntegratorConfig parse_integrator(const json& j) {
    expect_object(j, "integrator");
    reject_unknown_keys(j, "integrator",
                        {"scheme", "dt", "t_end", "cfl_safety", "positivity_tol", "clamp_budget",
                         "max_retries", "blowup_factor"});
    IntegratorConfig cfg;
    if (auto it = j.find("scheme"); it != j.end()) {
        const std::string s = as_string(*it, "integrator.scheme");
        if (s == "imex_euler")
            cfg.scheme = Scheme::imex_euler;
        else if (s == "explicit_euler")
            cfg.scheme = Scheme::explicit_euler;
        else if (s == "explicit_rk2")
            cfg.scheme = Scheme::explicit_rk2;
        else
            bad("integrator.scheme", "unknown scheme '" + s + "'");
    }
    cfg.dt = as_number(require(j, "integrator", "dt"), "integrator.dt");
    cfg.t_end = as_number(require(j, "integrator", "t_end"), "integrator.t_end");
    if (auto it = j.find("cfl_safety"); it != j.end())
        cfg.cfl_safety = as_number(*it, "integrator.cfl_safety");
    if (auto it = j.find("positivity_tol"); it != j.end())
        cfg.positivity_tol = as_number(*it, "integrator.positivity_tol");
    if (auto it = j.find("clamp_budget"); it != j.end())
        cfg.clamp_budget = as_number(*it, "integrator.clamp_budget");
    if (auto it = j.find("max_retries"); it != j.end())
        cfg.max_retries = as_int(*it, "integrator.max_retries");
    if (auto it = j.find("blowup_factor"); it != j.end())
        cfg.blowup_factor = as_number(*it, "integrator.blowup_factor");
    try {
        validate(cfg);
    } catch (const ConfigError& e) {
        bad("integrator", e.what());
    }
    return cfg;
}

std::string render_echo(const RunConfig& c) {
    json e;
    e["domain"] = {{"n", c.domain.n}};
    for (int a = 0; a < c.domain.n; ++a) {
        e["domain"]["L"].push_back(c.domain.L[a]);
        e["domain"]["N"].push_back(c.domain.N[a]);
    }
    json terms = json::array();
    for (int i = 0; i < c.system.m; ++i)
        for (const Term& t : c.system.field.component(i))
            terms.push_back({{"species", i + 1},
                             {"coefficient", t.coefficient},
                             {"exponents", t.exponents}});
    e["system"] = {{"m", c.system.m},
                   {"d", c.system.d},
                   {"terms", std::move(terms)},
                   {"balance_class", to_string(c.system.balance_class)},
                   {"reduce_to_conservative", c.reduce_to_conservative}};
    if (!c.system.weights.empty()) e["system"]["weights"] = c.system.weights;
    switch (c.initial.kind) {
        case InitialKind::constant:
            e["initial"] = {{"type", "constant"}, {"values", c.initial.values}};
            break;
        case InitialKind::cosine:
            e["initial"] = {{"type", "cosine"},
                            {"base", c.initial.base},
                            {"amplitude", c.initial.amplitude},
                            {"mode", c.initial.mode}};
            break;
        case InitialKind::file:
            e["initial"] = {{"type", "file"}, {"paths", c.initial.paths}};
            break;
        case InitialKind::random:
            e["initial"] = {{"type", "random"},
                            {"lo", c.initial.lo},
                            {"hi", c.initial.hi},
                            {"seed", c.initial.seed}};
            break;
    }
    e["integrator"] = {{"scheme", to_string(c.integrator.scheme)},
                       {"dt", c.integrator.dt},
                       {"t_end", c.integrator.t_end},
                       {"cfl_safety", c.integrator.cfl_safety},
                       {"positivity_tol", c.integrator.positivity_tol},
                       {"clamp_budget", c.integrator.clamp_budget},
                       {"max_retries", c.integrator.max_retries},
                       {"blowup_factor", c.integrator.blowup_factor}};
    e["monitor"] = {{"window", c.monitor.window}, {"record_every", c.monitor.record_every}};
    e["checks"] = {{"sample_count", c.checks.sample_count}, {"seed", c.checks.seed}};
    e["output"] = {{"directory", c.output.directory}, {"emit_svg", c.output.emit_svg}};
    if (c.output.snapshot_every) e["output"]["snapshot_every"] = *c.output.snapshot_every;
    return e.dump(2);
}

} // namespace

RunConfig parse_config(const json& doc) {
    expect_object(doc, "config");
    reject_unknown_keys(doc, "config",
                        {"domain", "system", "initial", "integrator", "monitor", "checks",
                         "output"});

    RunConfig cfg;
    cfg.domain = parse_domain(require(doc, "config", "domain"));
    cfg.system = parse_system(require(doc, "config", "system"), cfg.reduce_to_conservative);
    cfg.initial =
        parse_initial(require(doc, "config", "initial"), cfg.system.m, cfg.domain.n);
    cfg.integrator = parse_integrator(require(doc, "config", "integrator"));

    if (auto it = doc.find("monitor"); it != doc.end()) {
        expect_object(*it, "monitor");
        reject_unknown_keys(*it, "monitor", {"window", "record_every"});
        if (auto w = it->find("window"); w != it->end())
            cfg.monitor.window = as_number(*w, "monitor.window");
        if (auto r = it->find("record_every"); r != it->end())
            cfg.monitor.record_every = as_int(*r, "monitor.record_every");
        if (!(cfg.monitor.window > 0.0)) bad("monitor.window", "must be positive");
        if (cfg.monitor.record_every < 1) bad("monitor.record_every", "must be at least 1");
    }
    if (auto it = doc.find("checks"); it != doc.end()) {
        expect_object(*it, "checks");
        reject_unknown_keys(*it, "checks", {"sample_count", "seed"});
        if (auto s = it->find("sample_count"); s != it->end())
            cfg.checks.sample_count = as_int(*s, "checks.sample_count");
        if (auto s = it->find("seed"); s != it->end())
            cfg.checks.seed = as_seed(*s, "checks.seed");
        if (cfg.checks.sample_count < 1) bad("checks.sample_count", "must be at least 1");
    }
    if (auto it = doc.find("output"); it != doc.end()) {
        expect_object(*it, "output");
        reject_unknown_keys(*it, "output", {"directory", "emit_svg", "snapshot_every"});
        if (auto d = it->find("directory"); d != it->end())
            cfg.output.directory = as_string(*d, "output.directory");
        if (auto s = it->find("emit_svg"); s != it->end())
            cfg.output.emit_svg = as_bool(*s, "output.emit_svg");
        if (auto s = it->find("snapshot_every"); s != it->end()) {
            cfg.output.snapshot_every = as_number(*s, "output.snapshot_every");
            if (!(*cfg.output.snapshot_every > 0.0))
                bad("output.snapshot_every", "must be positive");
        }
    }

    cfg.echo = render_echo(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << is.rdbuf();
    const std::string text = buffer.str();
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t k = 0; k < std::min(e.byte, text.size()); ++k)
            if (text[k] == '\n') ++line;
        throw ConfigError(path + ":" + std::to_string(line) + ": " + e.what());
    }
    return parse_config(doc);
}

State build_initial_state(const RunConfig& config) {
    const BoxDomain& box = config.domain;
    const int m = config.system.m;
    State state;
    state.t = 0.0;
    state.species.reserve(m);

    switch (config.initial.kind) {
        case InitialKind::constant:
            for (int i = 0; i < m; ++i)
                state.species.push_back(ScalarField::constant(box, config.initial.values[i]));
            break;
        case InitialKind::cosine: {
            std::vector<double> shape(box.cells());
            std::size_t k = 0;
            for (int i0 = 0; i0 < box.N[0]; ++i0)
                for (int i1 = 0; i1 < box.N[1]; ++i1)
                    for (int i2 = 0; i2 < box.N[2]; ++i2, ++k) {
                        const int idx[3] = {i0, i1, i2};
                        double p = 1.0;
                        for (int a = 0; a < box.n; ++a)
                            p *= std::cos(config.initial.mode[a] * std::numbers::pi *
                                          box.center(a, idx[a]) / box.L[a]);
                        shape[k] = p;
                    }
            for (int i = 0; i < m; ++i) {
                ScalarField f{box, std::vector<double>(box.cells())};
                for (std::size_t c = 0; c < shape.size(); ++c)
                    f.v[c] = std::max(0.0, config.initial.base[i] +
                                               config.initial.amplitude[i] * shape[c]);
                state.species.push_back(std::move(f));
            }
            break;
        }
        case InitialKind::file:
            for (int i = 0; i < m; ++i)
                state.species.push_back(read_snapshot(config.initial.paths[i], box));
            break;
        case InitialKind::random: {
            std::mt19937_64 rng(config.initial.seed);
            std::uniform_real_distribution<double> dist(config.initial.lo, config.initial.hi);
            for (int i = 0; i < m; ++i) {
                ScalarField f{box, std::vector<double>(box.cells())};
                for (double& x : f.v) x = dist(rng);
                state.species.push_back(std::move(f));
            }
            break;
        }
    }
    return state;
}

} // namespace rdmass
