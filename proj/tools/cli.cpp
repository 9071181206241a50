#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>

#include "volterra/admissibility.hpp"
#include "volterra/carleson.hpp"
#include "volterra/controllability.hpp"
#include "volterra/errors.hpp"
#include "volterra/heat_examples.hpp"
#include "volterra/parallel.hpp"
#include "volterra/resolvent.hpp"

namespace volterra::cli {

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path.empty() ? "(root)" : path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(join(path, key), "missing required field");
    return *it;
}

double number(const json& obj, const std::string& key, const std::string& path, std::optional<double> def = {}) {
    if (!obj.is_object() || !obj.contains(key)) {
        if (def) return *def;
        throw ConfigError(join(path, key), "missing required field");
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
    return v.get<double>();
}

int integer(const json& obj, const std::string& key, const std::string& path, std::optional<int> def = {}) {
    if (!obj.is_object() || !obj.contains(key)) {
        if (def) return *def;
        throw ConfigError(join(path, key), "missing required field");
    }
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
    return v.get<int>();
}

std::string text(const json& obj, const std::string& key, const std::string& path, std::optional<std::string> def = {}) {
    if (!obj.is_object() || !obj.contains(key)) {
        if (def) return *def;
        throw ConfigError(join(path, key), "missing required field");
    }
    const auto& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
    return v.get<std::string>();
}

bool flag(const json& obj, const std::string& key, const std::string& path, bool def) {
    if (!obj.is_object() || !obj.contains(key)) return def;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) throw ConfigError(join(path, key), "expected true or false");
    return v.get<bool>();
}

void positive(double v, const std::string& path) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(path, "must be positive");
}

const json& analysis_of(const json& config) {
    static const json empty = json::object();
    auto it = config.find("analysis");
    if (it == config.end()) return empty;
    if (!it->is_object()) throw ConfigError("analysis", "expected an object");
    return *it;
}

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

// constants are finite by construction; optional lookups go through here
json maybe(const std::map<std::string, double>& m, const std::string& key) {
    auto it = m.find(key);
    if (it == m.end() || !std::isfinite(it->second)) return nullptr;
    return it->second;
}

json notes_of(const Report& r) { return json(r.notes); }

}  // namespace

json read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("(root)", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("(root)", "expected an object");
    return j;
}

cplx parse_complex(const json& j, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_object() && j.contains("re")) return {number(j, "re", path), number(j, "im", path, 0.0)};
    throw ConfigError(path, "expected a number, [re, im] or {\"re\", \"im\"}");
}

Kernel parse_kernel(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected a kernel object");
    const std::string type = text(j, "type", path);
    try {
        if (type == "power") return Kernel::power(number(j, "beta", path), number(j, "scale", path, 1.0));
        if (type == "exponential") return Kernel::exponential(number(j, "xi", path), number(j, "s", path, 0.0));
        if (type == "log") return Kernel::log();
        if (type == "stieltjes") {
            const auto& atoms = require(j, "atoms", path);
            if (!atoms.is_array()) throw ConfigError(join(path, "atoms"), "expected a list");
            std::vector<StieltjesAtom> out;
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                const std::string p = join(path, "atoms[" + std::to_string(i) + "]");
                out.push_back({number(atoms[i], "s", p), number(atoms[i], "weight", p)});
            }
            return Kernel::stieltjes(out);
        }
        if (type == "shifted")
            return Kernel::shifted(parse_kernel(require(j, "base", path), join(path, "base")), number(j, "omega", path));
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
    throw ConfigError(join(path, "type"), "unknown kernel type '" + type + "'");
}

DiagonalSystem parse_system(const json& config) {
    const auto& sys = require(config, "system", "");
    if (!sys.is_object()) throw ConfigError("system", "expected an object");
    const auto& ev = require(sys, "eigenvalues", "system");
    std::vector<cplx> lambda;
    if (ev.is_array()) {
        for (std::size_t i = 0; i < ev.size(); ++i)
            lambda.push_back(parse_complex(ev[i], "system.eigenvalues[" + std::to_string(i) + "]"));
    } else if (ev.is_object()) {
        if (ev.size() != 1) throw ConfigError("system.eigenvalues", "exactly one generator (rod, neumann, custom_power) expected");
        const auto& [name, g] = *ev.items().begin();
        const std::string p = "system.eigenvalues." + name;
        const int N = integer(g, "N", p);
        if (N < 1) throw ConfigError(p + ".N", "must be >= 1");
        if (name == "rod") {
            const double a = number(g, "alpha", p, 0.0);
            if (!(a >= 0.0 && a < 1.0)) throw ConfigError(p + ".alpha", "must lie in [0, 1)");
            for (int n = 1; n <= N; ++n) lambda.emplace_back(-double(n) * n * std::numbers::pi * std::numbers::pi);
        } else if (name == "neumann") {
            const int d = integer(g, "d", p);
            const double c_mid = number(g, "c_mid", p, 1.0);
            if (d < 1) throw ConfigError(p + ".d", "must be >= 1");
            positive(c_mid, p + ".c_mid");
            for (int n = 1; n <= N; ++n) lambda.emplace_back(-c_mid * std::pow(double(n), 2.0 / d));
        } else if (name == "custom_power") {
            const double rate = number(g, "rate", p), e = number(g, "exponent", p);
            positive(rate, p + ".rate");
            positive(e, p + ".exponent");
            for (int n = 1; n <= N; ++n) lambda.emplace_back(-rate * std::pow(double(n), e));
        } else {
            throw ConfigError(p, "unknown eigenvalue generator");
        }
    } else {
        throw ConfigError("system.eigenvalues", "expected a list or a generator object");
    }
    const auto& bj = require(sys, "b", "system");
    std::vector<cplx> b;
    if (bj.is_array()) {
        for (std::size_t i = 0; i < bj.size(); ++i) b.push_back(parse_complex(bj[i], "system.b[" + std::to_string(i) + "]"));
        if (b.size() != lambda.size())
            throw ConfigError("system.b", "length " + std::to_string(b.size()) + " does not match " +
                                              std::to_string(lambda.size()) + " eigenvalues");
    } else if (bj.is_object()) {
        if (bj.size() != 1 || !bj.contains("power_law")) throw ConfigError("system.b", "expected {\"power_law\": {\"delta\": x}}");
        const double delta = number(bj.at("power_law"), "delta", "system.b.power_law");
        for (std::size_t n = 1; n <= lambda.size(); ++n) b.emplace_back(std::pow(double(n), delta));
    } else {
        throw ConfigError("system.b", "expected a list or a power_law object");
    }
    const double cond = number(sys, "condition_number", "system", 1.0);
    try {
        return DiagonalSystem(lambda, b, cond);
    } catch (const DomainError& e) {
        throw ConfigError("system", e.what());
    }
}

ScalarSignal parse_input(const json& j, const std::string& path) {
    const std::string type = text(j, "type", path);
    try {
        if (type == "exponential") return ScalarSignal::exponential(parse_complex(require(j, "w", path), join(path, "w")));
        if (type == "frame") return ScalarSignal::frame(parse_complex(require(j, "lambda", path), join(path, "lambda")));
        if (type == "poly_exp") {
            const auto& p = require(j, "p", path);
            if (!p.is_array() || p.empty()) throw ConfigError(join(path, "p"), "expected a non-empty list");
            std::vector<cplx> coef;
            for (std::size_t i = 0; i < p.size(); ++i) coef.push_back(parse_complex(p[i], join(path, "p")));
            return ScalarSignal::poly_exp(coef, parse_complex(require(j, "w", path), join(path, "w")));
        }
        if (type == "sampled") {
            const auto& t = require(j, "t", path);
            const auto& v = require(j, "values", path);
            if (!t.is_array() || !v.is_array()) throw ConfigError(path, "t and values must be lists");
            std::vector<double> tt;
            std::vector<cplx> vv;
            for (const auto& x : t) {
                if (!x.is_number()) throw ConfigError(join(path, "t"), "expected numbers");
                tt.push_back(x.get<double>());
            }
            for (const auto& x : v) vv.push_back(parse_complex(x, join(path, "values")));
            return ScalarSignal::sampled(tt, vv);
        }
        if (type == "zero") return ScalarSignal::exponential(1.0).scaled(0.0);
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
    throw ConfigError(join(path, "type"), "unknown input type '" + type + "'");
}

namespace {

Kernel config_kernel(const json& config) { return parse_kernel(require(config, "kernel", ""), "kernel"); }

double default_beta(const Kernel& k, const json& a) {
    if (a.contains("beta")) return number(a, "beta", "analysis");
    if (auto p = std::get_if<PowerKernel>(&k.variant())) return p->beta;
    if (std::holds_alternative<ExponentialKernel>(k.variant())) return 1.0;
    throw ConfigError("analysis.beta", "required for this kernel type");
}

}  // namespace

TaskResult run_admissibility(const json& config, const GlobalOptions& g) {
    const auto sys = parse_system(config);
    const auto k = config_kernel(config);
    const auto& a = analysis_of(config);
    const double beta = default_beta(k, a);
    auto win = default_window(beta);
    const double beta1 = number(a, "beta1", "analysis", win.first);
    const double beta2 = number(a, "beta2", "analysis", win.second);
    const double omega = number(a, "omega", "analysis", 0.0);

    SupGridOptions grid;
    if (a.contains("grid")) {
        grid.n_re = integer(a["grid"], "n_re", "analysis.grid", grid.n_re);
        grid.n_im = integer(a["grid"], "n_im", "analysis.grid", grid.n_im);
    }
    auto nec = necessary_condition_sup(sys, k, omega, grid);

    SufficientOptions so;
    so.threads = g.threads;
    so.trend_tol = number(a, "trend_tol", "analysis", so.trend_tol);
    AnalysisReport suf;
    try {
        suf = sufficient_condition(sys, k, beta, beta1, beta2, so);
    } catch (const DomainError& e) {
        throw ConfigError("analysis.beta1", e.what());
    }

    json empirical = nullptr;
    const json emp_cfg = a.contains("empirical") ? a["empirical"] : json::object();
    AnalysisReport emp;
    if (flag(emp_cfg, "enabled", "analysis.empirical", true)) {
        const double T = number(emp_cfg, "T", "analysis.empirical", 10.0);
        positive(T, "analysis.empirical.T");
        EmpiricalOptions eo;
        eo.steps = integer(emp_cfg, "steps", "analysis.empirical", 100);
        eo.threads = g.threads;
        BatteryOptions bo;
        bo.seed = static_cast<std::uint64_t>(integer(emp_cfg, "seed", "analysis.empirical", 12345));
        emp = empirical_admissibility(sys, k, default_battery(T, bo), T, eo);
        empirical = emp.constant("empirical_M");
    }

    Verdict v = nec.verdict == Verdict::fail ? Verdict::fail : suf.verdict;
    json notes = json::array();
    for (const auto& n : nec.notes) notes.push_back("necessary: " + n);
    for (const auto& n : suf.notes) notes.push_back("sufficient: " + n);
    for (const auto& n : emp.notes) notes.push_back("empirical: " + n);

    TaskResult r;
    r.verdict = v;
    r.report = {
        {"verdict", to_string(v)},
        {"necessary_sup", maybe(nec.constants, "necessary_sup")},
        {"necessary",
         {{"verdict", to_string(nec.verdict)},
          {"witness", nec.witnesses.count("sup_at") ? cjson(nec.witnesses.at("sup_at")) : json(nullptr)},
          {"refined_sup", maybe(nec.diagnostics, "refined_sup")},
          {"omega", omega}}},
        {"sufficient",
         {{"verdict", to_string(suf.verdict)},
          {"beta", beta},
          {"beta1", beta1},
          {"beta2", beta2},
          {"one_regular_c", maybe(suf.constants, "one_regular_c")},
          {"sector_angle", maybe(suf.constants, "sector_angle")},
          {"growth_const", maybe(suf.constants, "growth_const")},
          {"carleson",
           {{"beta1_const", maybe(suf.constants, "beta1_const")},
            {"beta2_const", maybe(suf.constants, "beta2_const")},
            {"beta1_doubling_ratio", maybe(suf.diagnostics, "beta1_doubling_ratio")},
            {"beta2_doubling_ratio", maybe(suf.diagnostics, "beta2_doubling_ratio")}}}}},
        {"empirical_M", empirical},
        {"N", sys.size()},
        {"notes", notes},
    };
    return r;
}

TaskResult run_controllability(const json& config, const GlobalOptions& g) {
    const auto sys = parse_system(config);
    const auto& a = analysis_of(config);
    double xi_def = 1.0, s_def = 0.0;
    bool have_default = false;
    if (config.contains("kernel")) {
        const auto k = config_kernel(config);
        if (auto e = std::get_if<ExponentialKernel>(&k.variant())) {
            xi_def = e->xi;
            s_def = e->s;
            have_default = true;
        } else if (auto p = std::get_if<PowerKernel>(&k.variant()); p && p->beta == 1.0) {
            xi_def = p->scale;
            have_default = true;
        } else {
            throw ConfigError("kernel", "controllability needs an exponential kernel (or the Cauchy kernel)");
        }
    }
    if (!have_default && !(a.contains("xi"))) throw ConfigError("analysis.xi", "missing required field (no kernel given)");
    const double xi = number(a, "xi", "analysis", xi_def);
    const double s = number(a, "s", "analysis", s_def);
    const std::string mode = text(a, "mode", "analysis", std::string("exact"));
    const int K = integer(a, "K", "analysis", 2000);
    if (K < 1) throw ConfigError("analysis.K", "must be >= 1");
    McPhailOptions mo;
    mo.threads = g.threads;
    mo.trend_tol = number(a, "trend_tol", "analysis", mo.trend_tol);

    TaskResult r;
    json base = {{"mode", mode}, {"xi", xi}, {"s", s}, {"K", K}, {"N", sys.size()}};
    try {
        ControllabilityMeasure cm;
        if (mode == "exact") {
            cm = exact_controllability_measure(sys, xi, s, static_cast<std::size_t>(K), g.threads);
        } else if (mode == "null") {
            const double tau = number(a, "tau", "analysis");
            positive(tau, "analysis.tau");
            base["tau"] = tau;
            cm = null_controllability_measure(sys, xi, s, tau, static_cast<std::size_t>(K), g.threads);
        } else {
            throw ConfigError("analysis.mode", "expected exact or null");
        }
        auto rep = mcphail_verdict(cm, mo);
        r.verdict = rep.verdict;
        base["verdict"] = to_string(rep.verdict);
        base["constant"] = maybe(rep.constants, "constant");
        base["trend"] = {{"N_doubling_ratio", maybe(rep.diagnostics, "N_doubling_ratio")},
                         {"K_doubling_ratio", maybe(rep.diagnostics, "K_doubling_ratio")}};
        base["epsilon_min"] = maybe(rep.constants, "epsilon_min");
        base["epsilon_log_min"] = maybe(rep.diagnostics, "epsilon_log_min");
        base["notes"] = notes_of(rep);
    } catch (const StructuralError& e) {
        r.verdict = Verdict::fail;
        base["verdict"] = to_string(Verdict::fail);
        base["constant"] = nullptr;
        base["trend"] = {{"N_doubling_ratio", nullptr}, {"K_doubling_ratio", nullptr}};
        base["epsilon_min"] = nullptr;
        base["epsilon_log_min"] = nullptr;
        base["notes"] = json::array({std::string("structural failure: ") + e.what()});
    }
    r.report = base;
    return r;
}

TaskResult run_simulate(const json& config, const GlobalOptions& g) {
    const auto sys = parse_system(config);
    const auto k = config_kernel(config);
    const auto& a = analysis_of(config);
    const double T = number(a, "T", "analysis", 10.0);
    positive(T, "analysis.T");
    const int steps = integer(a, "steps", "analysis", 200);
    if (steps < 1) throw ConfigError("analysis.steps", "must be >= 1");
    auto u = a.contains("input") ? parse_input(a["input"], "analysis.input") : ScalarSignal::exponential(1.0).scaled(0.0);
    if (flag(a, "normalize", "analysis", true) && u.norm() > 0.0) u = u.normalized();
    std::vector<cplx> x0;
    if (a.contains("x0")) {
        const auto& xj = a["x0"];
        if (!xj.is_array() || xj.size() != sys.size()) throw ConfigError("analysis.x0", "expected one entry per mode");
        for (const auto& x : xj) x0.push_back(parse_complex(x, "analysis.x0"));
    }
    SimulationOptions so;
    so.threads = g.threads;
    so.estimate_error = flag(a, "estimate_error", "analysis", true);
    auto res = simulate_state(sys, k, x0, u, {T, steps}, so);

    const bool modes = flag(a, "modes_in_csv", "analysis", false);
    std::ostringstream csv;
    csv << "t,state_norm";
    if (modes)
        for (std::size_t n = 0; n < sys.size(); ++n) csv << ",mode" << n + 1 << "_re,mode" << n + 1 << "_im";
    csv << "\r\n";
    for (std::size_t i = 0; i < res.t.size(); ++i) {
        csv << format_double(res.t[i]) << ',' << format_double(res.state_norm[i]);
        if (modes)
            for (std::size_t n = 0; n < sys.size(); ++n)
                csv << ',' << format_double(res.modes[n][i].real()) << ',' << format_double(res.modes[n][i].imag());
        csv << "\r\n";
    }
    TaskResult r;
    r.verdict = Verdict::pass;
    r.report = {{"verdict", "complete"},
                {"sup_norm", res.sup_norm},
                {"at_t", res.at_t},
                {"error_estimate", so.estimate_error ? json(res.error_estimate) : json(nullptr)},
                {"N", sys.size()},
                {"T", T},
                {"steps", steps},
                {"input", {{"label", u.label()}, {"norm", u.norm()}}}};
    r.files.emplace_back("simulation.csv", csv.str());
    return r;
}

TaskResult run_carleson(const json& config, const GlobalOptions&) {
    const auto& a = analysis_of(config);
    DiscreteMeasure mu;
    if (a.contains("measure")) {
        const auto& atoms = require(a["measure"], "atoms", "analysis.measure");
        if (!atoms.is_array()) throw ConfigError("analysis.measure.atoms", "expected a list");
        std::vector<Atom> v;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            const std::string p = "analysis.measure.atoms[" + std::to_string(i) + "]";
            v.push_back({parse_complex(require(atoms[i], "z", p), p + ".z"), number(atoms[i], "mass", p)});
        }
        try {
            mu = DiscreteMeasure(v);
        } catch (const DomainError& e) {
            throw ConfigError("analysis.measure", e.what());
        }
    } else {
        mu = system_measure(parse_system(config));
    }
    const double gamma = number(a, "gamma", "analysis", 1.0);
    positive(gamma, "analysis.gamma");
    const double h_max = number(a, "h_max", "analysis", std::numeric_limits<double>::infinity());
    auto c = geometric_carleson_constant(mu, gamma, h_max);
    TaskResult r;
    r.verdict = Verdict::pass;
    r.report = {{"verdict", "complete"},
                {"gamma", gamma},
                {"constant", c.constant},
                {"witness_center", c.witness.omega},
                {"witness_side", c.witness.h},
                {"atoms", mu.size()},
                {"total_mass", mu.total_mass()}};
    if (!mu.empty()) {
        const double p = number(a, "p", "analysis", 2.0), q = number(a, "q", "analysis", 2.0);
        auto kt = kernel_embedding_test(mu, p, q, default_test_points(mu));
        r.report["kernel_test"] = {{"p", p}, {"q", q}, {"constant", kt.constant}, {"witness", cjson(kt.witness)}};
    }
    if (a.contains("balayage_omega")) {
        json out = json::array();
        for (const auto& w : a["balayage_omega"]) {
            if (!w.is_number()) throw ConfigError("analysis.balayage_omega", "expected numbers");
            auto b = balayage(mu, w.get<double>());
            out.push_back({{"omega", w.get<double>()}, {"value", b.value}, {"near_singular", b.near_singular}});
        }
        r.report["balayage"] = out;
    }
    if (a.contains("beta1") || a.contains("beta2")) {
        auto e = embedding_gamma_carleson(mu, gamma, number(a, "beta1", "analysis"), number(a, "beta2", "analysis"));
        r.verdict = e.verdict;
        r.report["verdict"] = to_string(e.verdict);
        r.report["embedding"] = {{"beta1_const", maybe(e.constants, "beta1_const")},
                                 {"beta2_const", maybe(e.constants, "beta2_const")},
                                 {"notes", notes_of(e)}};
    }
    return r;
}

TaskResult run_resolvent(const json& config, const GlobalOptions& g) {
    const auto k = config_kernel(config);
    const auto& a = analysis_of(config);
    const cplx ln = parse_complex(require(a, "lambda_n", "analysis"), "analysis.lambda_n");
    std::vector<double> t;
    bool uniform = false;
    if (a.contains("t")) {
        if (!a["t"].is_array()) throw ConfigError("analysis.t", "expected a list");
        for (const auto& x : a["t"]) {
            if (!x.is_number() || x.get<double>() < 0.0) throw ConfigError("analysis.t", "expected nonnegative numbers");
            t.push_back(x.get<double>());
        }
    } else {
        const double T = number(a, "T", "analysis", 5.0);
        positive(T, "analysis.T");
        const int steps = integer(a, "steps", "analysis", 100);
        if (steps < 1) throw ConfigError("analysis.steps", "must be >= 1");
        for (int i = 0; i <= steps; ++i) t.push_back(T * i / steps);
        uniform = true;
    }
    const std::string method = text(a, "method", "analysis", std::string("auto"));
    InversionOptions inv;
    const std::string im = text(a, "inversion", "analysis", std::string("talbot"));
    if (im == "talbot")
        inv.method = InversionMethod::talbot;
    else if (im == "bromwich")
        inv.method = InversionMethod::bromwich;
    else
        throw ConfigError("analysis.inversion", "expected talbot or bromwich");
    if (g.tol) inv.tol = *g.tol;
    std::optional<ScalarResolvent> c;
    if (method == "auto")
        c.emplace(k, ln);
    else if (method == "closed_form")
        c.emplace(k, ln, ResolventMethod::closed_form, inv);
    else if (method == "mittag_leffler")
        c.emplace(k, ln, ResolventMethod::mittag_leffler, inv);
    else if (method == "numeric_inversion")
        c.emplace(k, ln, ResolventMethod::numeric_inversion, inv);
    else
        throw ConfigError("analysis.method", "unknown method '" + method + "'");

    std::vector<cplx> vals(t.size());
    parallel_for(t.size(), [&](std::size_t i) { vals[i] = (*c)(t[i]); }, g.threads);
    std::optional<ResidualProfile> prof;
    if (uniform && flag(a, "residual", "analysis", true) && t.size() >= 3) {
        try {
            prof = resolvent_residual(k, ln, [&](double s) { return (*c)(s); }, t);
        } catch (const UnsupportedKernel&) {
            // no time-domain density; values only
        }
    }
    std::ostringstream csv;
    csv << "t,re,im" << (prof ? ",residual" : "") << "\r\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        csv << format_double(t[i]) << ',' << format_double(vals[i].real()) << ',' << format_double(vals[i].imag());
        if (prof) csv << ',' << format_double(prof->residual[i]);
        csv << "\r\n";
    }
    TaskResult r;
    r.verdict = Verdict::pass;
    r.report = {{"verdict", "complete"},
                {"method", to_string(c->method())},
                {"lambda_n", cjson(ln)},
                {"points", t.size()},
                {"c_last", cjson(vals.back())}};
    if (prof) {
        r.report["residual_max"] = prof->max;
        r.report["residual_at"] = prof->at;
    }
    r.files.emplace_back("resolvent.csv", csv.str());
    return r;
}

TaskResult run_heat(const json& config, const GlobalOptions& g) {
    const auto& a = analysis_of(config);
    HeatSystemSpec spec;
    const std::string bc = text(a, "bc", "analysis", std::string("dirichlet"));
    if (bc == "dirichlet")
        spec.boundary = Boundary::dirichlet_rod;
    else if (bc == "neumann")
        spec.boundary = Boundary::neumann;
    else
        throw ConfigError("analysis.bc", "expected dirichlet or neumann");
    spec.alpha = number(a, "alpha", "analysis", 0.0);
    spec.delta = number(a, "delta", "analysis");
    spec.N = integer(a, "N", "analysis", 10000);
    spec.d = integer(a, "dim", "analysis", 1);
    spec.c_mid = number(a, "c_mid", "analysis", 1.0);
    if (!(spec.alpha >= 0.0 && spec.alpha < 1.0)) throw ConfigError("analysis.alpha", "must lie in [0, 1)");
    if (spec.N < 1) throw ConfigError("analysis.N", "must be >= 1");
    if (spec.d < 1) throw ConfigError("analysis.dim", "must be >= 1");
    positive(spec.c_mid, "analysis.c_mid");

    const auto model = heat_system(spec);
    const double mu_N = std::abs(model.system.eigenvalues().back());
    const double h_min = number(a, "h_min", "analysis", 1e2);
    const double h_max = number(a, "h_max", "analysis", std::min(1e6, mu_N));
    const int h_count = integer(a, "h_count", "analysis", 200);
    if (!(h_max > h_min) || h_count < 2) throw ConfigError("analysis.h_max", "need h_max > h_min and h_count >= 2");
    auto e = carleson_scaling_experiment(spec, log_spaced(h_min, h_max, h_count), g.threads);

    const int suff_N = std::min(spec.N, integer(a, "sufficient_N", "analysis", 256));
    HeatSystemSpec small = spec;
    small.N = suff_N;
    const auto sm = heat_system(small);
    auto [b1, b2] = default_window(sm.beta);
    SufficientOptions so;
    so.threads = g.threads;
    auto suf = sufficient_condition(sm.system, sm.kernel, sm.beta, b1, b2, so);

    const double thr = heat_threshold(spec);
    std::ostringstream csv;
    csv << "h,mu_Qh,ratio\r\n";
    for (std::size_t i = 0; i < e.h.size(); ++i)
        csv << format_double(e.h[i]) << ',' << format_double(e.mu_Qh[i]) << ',' << format_double(e.ratio[i]) << "\r\n";
    TaskResult r;
    r.verdict = e.bounded ? Verdict::pass : Verdict::fail;
    r.report = {{"verdict", to_string(r.verdict)},
                {"bc", bc},
                {"alpha", spec.alpha},
                {"delta", spec.delta},
                {"N", spec.N},
                {"dim", spec.d},
                {"threshold", thr},
                {"below_threshold", spec.delta < thr},
                {"predicted_slope", e.predicted_slope},
                {"measured_slope", e.slope},
                {"slope_tolerance", e.slope_tolerance},
                {"bounded", e.bounded},
                {"sufficient",
                 {{"verdict", to_string(suf.verdict)}, {"N", suff_N}, {"beta", sm.beta}, {"beta1", b1}, {"beta2", b2}}}};
    if (spec.boundary == Boundary::neumann)
        r.report["notes"] = json::array({"midpoint eigenvalue model; verdicts depend only on the exponent 2/d"});
    r.files.emplace_back("scaling.csv", csv.str());
    return r;
}

std::vector<SelfcheckItem> selfcheck(std::optional<double> tol) {
    std::vector<SelfcheckItem> items;
    auto add = [&](const std::string& name, double value, double expected, double t) {
        const double use = tol ? *tol : t;
        items.push_back({name, value, expected, use, std::abs(value - expected) <= use});
    };
    const double pi = std::numbers::pi;
    const double e = std::exp(1.0);
    add("laplace power(1/2) at i", laplace_transform(Kernel::power(0.5), cplx(1e-12, 1.0)).real(), std::sqrt(0.5), 1e-10);
    add("one-regular constant of power(0.7)", check_one_regular(Kernel::power(0.7), default_grid()).constant("c"), 0.7, 1e-10);
    add("growth constant exponential(1,1)",
        check_growth(Kernel::exponential(1.0, 1.0), 1.0, GrowthDirection::lower, log_spaced(1.0, 1e4, 50)).constant("constant"),
        0.5, 1e-12);
    add("c_exponential(-1; 1, 1) at t=1", c_exponential(-1.0, 1.0, 1.0, 1.0).real(), 0.5 + 0.5 * std::exp(-2.0), 1e-12);
    add("E_1/2(-1) = e erfc(1)", mittag_leffler(0.5, -1.0).real(), e * std::erfc(1.0), 1e-10);
    add("E_1(1+i) = e^(1+i)", std::abs(mittag_leffler(1.0, cplx(1.0, 1.0)) - std::exp(cplx(1.0, 1.0))), 0.0, 1e-10);
    add("Talbot inversion of 1/(l+1) at t=1",
        invert_laplace([](cplx l) { return 1.0 / (l + 1.0); }, 1.0).value.real(), 1.0 / e, 1e-8);
    add("Carleson constant of one atom", geometric_carleson_constant(DiscreteMeasure({{1.0, 1.0}}), 1.0).constant, 1.0, 0.0);
    {
        std::vector<Atom> d;
        for (int j = 0; j <= 3; ++j) d.push_back({std::ldexp(1.0, -j), 1.0});
        add("Carleson constant of dyadic atoms", geometric_carleson_constant(DiscreteMeasure(d), 1.0, 10.0).constant, 8.0, 0.0);
    }
    add("H^2 kernel constant", hp_norm_constant(2.0), std::sqrt(pi), 1e-12);
    add("necessary sup, single Cauchy mode",
        necessary_condition_sup(DiagonalSystem({-1.0}, {1.0}), Kernel::cauchy()).constant("necessary_sup"), 0.25, 1e-6);
    add("frame function at t=1", frame_input(1.0, 1.0).real(), 2.0 / e, 1e-14);
    add("g_function, Cauchy", g_function(1.0, 1.0, Kernel::cauchy()).real(), 0.5, 1e-14);
    add("empirical M, Cauchy",
        empirical_admissibility(DiagonalSystem({-1.0}, {1.0}), Kernel::cauchy(),
                                {ScalarSignal::exponential(1.0).normalized()}, 10.0)
            .constant("empirical_M"),
        std::sqrt(2.0) / e, 1e-8);
    add("B_inf numeric, Cauchy with e^-t",
        b_infinity_numeric(DiagonalSystem({-1.0}, {1.0}), Kernel::cauchy(), ScalarSignal::exponential(1.0), 60.0)
            .coefficients[0]
            .real(),
        0.5, 1e-6);
    add("B_inf on exponentials, power(1/2)",
        action_on_exponential(DiagonalSystem({-1.0}, {1.0}), Kernel::power(0.5), 1.0).coefficients[0].real(), 0.5, 1e-14);
    add("Blaschke weight eps_1", blaschke_weight(0, DiagonalSystem({-1.0, -2.0}, {1.0, 1.0}), 1.0, 0.0, 8).value, 1.0 / 3.0,
        1e-14);
    add("null mass at tau=1",
        null_controllability_measure(DiagonalSystem({-1.0}, {1.0}), 1.0, 0.0, 1.0, 4).atoms[0].mass, std::exp(-2.0), 1e-12);
    add("B_inf explicit, s=1",
        b_infinity_exponential(DiagonalSystem({-1.0}, {1.0}), 1.0, 1.0, [](cplx w) { return 1.0 / (w + 1.0); })
            .coefficients[0]
            .real(),
        2.0 / 3.0, 1e-14);
    add("Dirichlet threshold alpha=1/3", dirichlet_threshold(1.0 / 3.0), 0.25, 1e-15);
    add("Neumann threshold d=2", neumann_threshold(2, 0.0), 0.0, 1e-15);
    {
        HeatSystemSpec s;
        s.alpha = 0.0;
        s.delta = 0.3;
        s.N = 10000;
        auto x = carleson_scaling_experiment(s, log_spaced(1e2, 1e6, 200));
        add("rod scaling slope alpha=0 delta=0.3", x.slope, -0.2, 0.05);
    }
    return items;
}

std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << contents;
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

int exit_for(Verdict v) { return v == Verdict::fail ? 2 : 0; }

std::filesystem::path out_dir(const GlobalOptions& g) {
    std::filesystem::path p = g.out_dir.empty() ? std::filesystem::path(".") : std::filesystem::path(g.out_dir);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

int execute(const std::string& task, const GlobalOptions& g, const json& analysis_overrides, std::ostream& out,
            std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    json config;
    TaskResult result;
    try {
        if (g.config_path.empty()) {
            if (task != "example") throw ConfigError("--config", "a config document is required for " + task);
            config = json::object();
        } else {
            config = read_config(g.config_path);
            const auto& v = require(config, "schema_version", "");
            if (!v.is_number_integer() || v.get<int>() != schema_version)
                throw ConfigError("schema_version", "unsupported schema version (expected " + std::to_string(schema_version) + ")");
        }
        if (!analysis_overrides.empty()) {
            if (!config.contains("analysis")) config["analysis"] = json::object();
            for (const auto& [key, val] : analysis_overrides.items()) config["analysis"][key] = val;
        }
        const auto& a = analysis_of(config);
        if (a.contains("task") && a["task"] != task)
            throw ConfigError("analysis.task", "config is for '" + a["task"].dump() + "', not '" + task + "'");
        if (a.contains("tolerances")) {
            const auto& t = a["tolerances"];
            if (!t.is_object()) throw ConfigError("analysis.tolerances", "expected an object");
            for (const auto& [key, val] : t.items())
                if (!val.is_number() || !(val.get<double>() > 0.0))
                    throw ConfigError("analysis.tolerances." + key, "tolerances must be positive");
        }
        if (g.threads > 0) set_default_threads(g.threads);

        if (task == "admissibility")
            result = run_admissibility(config, g);
        else if (task == "controllability")
            result = run_controllability(config, g);
        else if (task == "simulate")
            result = run_simulate(config, g);
        else if (task == "carleson")
            result = run_carleson(config, g);
        else if (task == "resolvent")
            result = run_resolvent(config, g);
        else if (task == "example")
            result = run_heat(config, g);
        else
            throw ConfigError("task", "unknown task '" + task + "'");
    } catch (const ConfigError& e) {
        err << "error: config " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "error [" << task << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    const std::string hash = hex64(fnv1a(config.dump()));
    json report = result.report;
    report["task"] = task;
    report["schema_version"] = schema_version;
    report["config_hash"] = hash;
    const int code = exit_for(result.verdict);
    try {
        const auto dir = out_dir(g);
        json files = json::array({"report.json"});
        write_atomic(dir / "report.json", report.dump(2) + "\n");
        for (const auto& [name, contents] : result.files) {
            write_atomic(dir / name, contents);
            files.push_back(name);
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json manifest = {{"config_hash", hash},
                         {"config_path", g.config_path},
                         {"tool_version", tool_version},
                         {"schema_version", schema_version},
                         {"task", task},
                         {"threads", g.threads > 0 ? g.threads : default_threads()},
                         {"wall_time_s", wall},
                         {"timestamp", utc_timestamp()},
                         {"exit_code", code},
                         {"files", files}};
        write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    out << task << ": " << report.value("verdict", std::string("complete")) << "\n";
    return code;
}

int execute_selfcheck(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
    std::vector<SelfcheckItem> items;
    try {
        items = selfcheck(g.tol);
    } catch (const std::exception& e) {
        err << "error [selfcheck]: " << e.what() << "\n";
        return 1;
    }
    int failed = 0;
    json list = json::array();
    for (const auto& it : items) {
        out << (it.pass ? "PASS " : "FAIL ") << it.name << ": got " << format_double(it.value) << ", expected "
            << format_double(it.expected) << " (tol " << it.tol << ")\n";
        failed += !it.pass;
        list.push_back({{"name", it.name}, {"value", it.value}, {"expected", it.expected}, {"tol", it.tol}, {"pass", it.pass}});
    }
    out << (items.size() - failed) << "/" << items.size() << " oracle items passed\n";
    if (!g.out_dir.empty()) {
        try {
            const auto dir = out_dir(g);
            json report = {{"task", "selfcheck"}, {"schema_version", schema_version}, {"items", list},
                           {"verdict", failed ? "fail" : "pass"}};
            write_atomic(dir / "report.json", report.dump(2) + "\n");
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return 1;
        }
    }
    return failed ? 2 : 0;
}

}  // namespace volterra::cli
