#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"

int main(int argc, char** argv) {
    using volterra::cli::json;
    CLI::App app{"volterra: admissibility and controllability of diagonal Volterra systems"};
    app.require_subcommand(1);
    volterra::cli::GlobalOptions g;
    app.add_option("--config", g.config_path, "JSON config document");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
    double tol = 0.0;
    auto* tol_opt = app.add_option("--tol", tol, "tolerance override")->check(CLI::PositiveNumber);

    json overrides = json::object();
    std::string task;

    auto* adm = app.add_subcommand("admissibility", "necessary, sufficient and empirical admissibility");
    adm->callback([&] { task = "admissibility"; });

    auto* ctl = app.add_subcommand("controllability", "exact / null controllability measures");
    double xi = 0, s = 0, tau = 0;
    std::string mode;
    auto* xi_o = ctl->add_option("--xi", xi);
    auto* s_o = ctl->add_option("--s", s);
    auto* tau_o = ctl->add_option("--tau", tau);
    auto* mode_o = ctl->add_option("--mode", mode)->check(CLI::IsMember({"exact", "null"}));
    ctl->callback([&] {
        task = "controllability";
        if (*xi_o) overrides["xi"] = xi;
        if (*s_o) overrides["s"] = s;
        if (*tau_o) overrides["tau"] = tau;
        if (*mode_o) overrides["mode"] = mode;
    });

    auto* sim = app.add_subcommand("simulate", "state trajectory under a scalar input");
    sim->callback([&] { task = "simulate"; });

    auto* car = app.add_subcommand("carleson", "Carleson constants of a discrete measure");
    double gamma = 0, hmax = 0;
    auto* g_o = car->add_option("--gamma", gamma)->check(CLI::PositiveNumber);
    auto* h_o = car->add_option("--hmax", hmax)->check(CLI::PositiveNumber);
    car->callback([&] {
        task = "carleson";
        if (*g_o) overrides["gamma"] = gamma;
        if (*h_o) overrides["h_max"] = hmax;
    });

    auto* res = app.add_subcommand("resolvent", "scalar resolvent c_n(t)");
    res->require_subcommand(1);
    auto* eval = res->add_subcommand("eval", "evaluate c_n on a time grid");
    eval->callback([&] { task = "resolvent"; });

    auto* ex = app.add_subcommand("example", "built-in examples");
    ex->require_subcommand(1);
    auto* heat = ex->add_subcommand("heat", "heat conduction with memory: thresholds and scaling experiment");
    std::string bc;
    double alpha = 0, delta = 0, c_mid = 0;
    int N = 0, dim = 0;
    auto* bc_o = heat->add_option("--bc", bc)->check(CLI::IsMember({"dirichlet", "neumann"}));
    auto* a_o = heat->add_option("--alpha", alpha);
    auto* d_o = heat->add_option("--delta", delta);
    auto* n_o = heat->add_option("--N", N);
    auto* dim_o = heat->add_option("--dim", dim);
    auto* c_o = heat->add_option("--c-mid", c_mid);
    heat->callback([&] {
        task = "example";
        if (*bc_o) overrides["bc"] = bc;
        if (*a_o) overrides["alpha"] = alpha;
        if (*d_o) overrides["delta"] = delta;
        if (*n_o) overrides["N"] = N;
        if (*dim_o) overrides["dim"] = dim;
        if (*c_o) overrides["c_mid"] = c_mid;
    });

    auto* self = app.add_subcommand("selfcheck", "run the built-in oracle suite");
    self->callback([&] { task = "selfcheck"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    if (*tol_opt) g.tol = tol;
    if (task == "selfcheck") return volterra::cli::execute_selfcheck(g, std::cout, std::cerr);
    return volterra::cli::execute(task, g, overrides, std::cout, std::cerr);
}
