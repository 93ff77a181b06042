// Command-line front end: solve, verify, bench, transform.
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "degen/pipeline.hpp"

namespace {

struct Options {
    degen::RunConfig config;
    std::vector<int> grid;
    std::string scheme = "central";
    std::string problem;
    std::string bench;
    std::string source;
    std::string verify_dir;
};

void add_run_flags(CLI::App& app, Options& o) {
    app.add_option("--grid", o.grid, "grid size NX NY")->expected(2);
    app.add_option("--eps0", o.config.eps0, "first regularization parameter");
    app.add_option("--eps-ratio", o.config.eps_ratio, "geometric ratio of the eps sequence");
    app.add_option("--eps-floor", o.config.eps_floor, "smallest eps (default max(1e-5, hy))");
    app.add_option("--cauchy-tol", o.config.cauchy_tolerance, "relative L2 Cauchy tolerance");
    app.add_option("--scheme", o.scheme, "first-order differencing")->check(CLI::IsMember({"central", "upwind"}));
    app.add_option("--out", o.config.out, "output directory");
    app.add_option("--threads", o.config.threads, "worker cap");
    app.add_option("--omega-star", o.config.omega_star, "lower bound required of omega");
    app.add_option("--tests", o.config.residual_tests, "weak residual test functions");
    app.add_flag("--override", o.config.override_structural, "continue when structural conditions fail");
    app.add_option("--radius", o.config.bench_params.radius, "disk interface radius");
    app.add_option("--beta", o.config.bench_params.beta, "disk drift strength");
    app.add_option("--lambda", o.config.bench_params.lambda, "crown parameter in (0, 1)");
    app.add_option("--theta-pole", o.config.bench_params.theta_pole, "crown pole cut-off");
    app.add_option("--source", o.source, "replacement source expression");
}

void finish_config(Options& o) {
    if (o.grid.size() == 2) o.config.nx = o.grid[0], o.config.ny = o.grid[1];
    o.config.scheme = o.scheme == "upwind" ? degen::Scheme::Upwind : degen::Scheme::Central;
    if (!o.problem.empty()) o.config.problem_file = o.problem;
    if (!o.bench.empty()) o.config.benchmark = o.bench;
    if (!o.source.empty()) o.config.bench_params.source = o.source;
}

int report(const degen::PipelineResult& r) {
    if (!r.summary.is_null()) std::cout << r.summary.dump(2) << '\n';
    (r.exit_code == 0 ? std::cout : std::cerr) << r.message << '\n';
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solver and verification lab for degenerate elliptic boundary value problems"};
    app.require_subcommand(1);
    Options o;

    auto* solve = app.add_subcommand("solve", "run the eps continuation on both sides and glue");
    solve->add_option("--problem", o.problem, "problem JSON file");
    solve->add_option("--bench", o.bench, "benchmark name");
    add_run_flags(*solve, o);

    auto* verify = app.add_subcommand("verify", "check the estimates of a solve bundle");
    verify->add_option("dir", o.verify_dir, "solve output directory")->required();
    verify->add_option("--tests", o.config.residual_tests, "weak residual test functions");

    auto* bench = app.add_subcommand("bench", "built-in benchmarks");
    bench->require_subcommand(1);
    bench->add_subcommand("list", "list benchmark names");
    auto* bench_run = bench->add_subcommand("run", "solve and verify a benchmark");
    bench_run->add_option("name", o.bench, "benchmark name")->required();
    add_run_flags(*bench_run, o);

    auto* transform = app.add_subcommand("transform", "canonical strip form of a problem");
    transform->add_option("--problem", o.problem, "problem JSON file");
    transform->add_option("--bench", o.bench, "benchmark name");
    add_run_flags(*transform, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : degen::kExitConfig;
    }
    finish_config(o);

    if (*solve) return report(degen::run_solve(o.config));
    if (*verify) return report(degen::run_verify(o.verify_dir, o.config.residual_tests));
    if (*transform) return report(degen::run_transform_command(o.config));
    if (bench->got_subcommand("list")) {
        for (const auto& [name, what] : degen::list_benchmarks()) std::cout << name << "\t" << what << '\n';
        return 0;
    }
    return report(degen::run_pipeline(o.config));
}
