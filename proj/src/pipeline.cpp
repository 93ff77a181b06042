#include "degen/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "degen/chart.hpp"
#include "degen/estimates.hpp"
#include "degen/structural.hpp"
#include "degen/transform.hpp"
#include "degen/weak_residual.hpp"

namespace degen {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void RunConfig::validate() const {
    if (problem_file.has_value() == benchmark.has_value()) {
        throw ConfigError("exactly one of a problem file or a benchmark name is required");
    }
    if (nx < 8 || ny < 8) throw ConfigError("grid sizes must be at least 8");
    auto positive = [](const std::optional<double>& v, const char* what) {
        if (v && !(*v > 0.0 && std::isfinite(*v))) throw ConfigError(std::string(what) + " must be positive");
    };
    positive(eps0, "eps0");
    positive(eps_ratio, "eps ratio");
    positive(eps_floor, "eps floor");
    positive(cauchy_tolerance, "Cauchy tolerance");
    if (!(omega_star > 0.0)) throw ConfigError("omega* must be positive");
    if (threads < 1) throw ConfigError("threads must be at least 1");
    if (residual_tests < 1) throw ConfigError("residual test count must be at least 1");
}

namespace {

class StageError : public std::runtime_error {
public:
    StageError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] int code() const { return code_; }

private:
    int code_;
};

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

const char* side_name(Side s) { return s == Side::Plus ? "plus" : "minus"; }
Side side_from(const std::string& s) { return s == "plus" ? Side::Plus : Side::Minus; }

bool is_zero(const SourceTerm& F) {
    const auto* e = std::get_if<FieldExpression>(&F);
    return e && e->is_constant() && e->constant_value() == 0.0;
}

bool is_zero(const StripField& f) {
    const auto* e = f.expression();
    return e && e->is_constant() && e->constant_value() == 0.0;
}

struct Resolved {
    BenchmarkInstance instance;
    json source;
    std::optional<double> solution_tolerance;
};

Resolved resolve(const RunConfig& config) {
    Resolved r;
    if (config.problem_file) {
        ProblemSpec spec = load_problem_file(config.problem_file->string());
        try {
            spec = homogenize(spec);
        } catch (const ProblemError& e) {
            throw ConfigError(e.what());
        }
        r.instance.name = spec.name;
        r.instance.description = "problem file";
        if (is_zero(spec.F) && spec.g.is_constant() && spec.g.constant_value() == 0.0) {
            r.instance.expected = FieldExpression::constant(0.0);
            r.solution_tolerance = 1e-10;
        }
        r.instance.problem = std::move(spec);
        r.source = {{"problem_file", config.problem_file->string()}};
        return r;
    }
    try {
        r.instance = make_benchmark(*config.benchmark, config.bench_params);
    } catch (const ProblemError& e) {
        throw ConfigError(e.what());
    }
    const auto& p = config.bench_params;
    r.source = {{"benchmark", *config.benchmark},
                {"radius", p.radius},
                {"beta", p.beta},
                {"lambda", p.lambda},
                {"theta_pole", p.theta_pole},
                {"source", p.source ? json(*p.source) : json(nullptr)}};
    const bool zero_source = (r.instance.problem && is_zero(r.instance.problem->F)) ||
                             (r.instance.strip && !r.instance.manufactured_eps && is_zero(r.instance.strip->f));
    if (const KnownFact* f = r.instance.fact("max_abs_solution")) r.solution_tolerance = f->tolerance;
    if (zero_source) r.solution_tolerance = 1e-10;
    if (*config.benchmark == "strip-quadratic") r.solution_tolerance = 1e-8;
    return r;
}

json strip_structural(const CanonicalCoefficients& cc, double omega_star, bool& pass) {
    double min_omega = 1e300, max_b = -1e300, max_c = -1e300;
    for (int i = 0; i < 64; ++i) {
        const double x = -std::numbers::pi + 2.0 * std::numbers::pi * i / 64;
        max_b = std::max(max_b, cc.b(x, 0.0));
        for (int j = 0; j <= 32; ++j) {
            const double y = -cc.d_minus + (cc.d_plus + cc.d_minus) * j / 32;
            min_omega = std::min(min_omega, cc.omega(x, y));
            max_c = std::max(max_c, cc.c(x, y));
        }
    }
    const bool omega_ok = min_omega >= omega_star, b_ok = max_b < 0.0, c_ok = max_c <= 0.0;
    pass = omega_ok && b_ok && c_ok;
    std::string failures;
    if (!omega_ok) failures += "omega below omega*; ";
    if (!b_ok) failures += "b0 = b(x, 0) not negative; ";
    if (!c_ok) failures += "c positive somewhere; ";
    return {{"kind", "strip"},     {"min_omega", min_omega}, {"omega_star", omega_star}, {"max_b0", max_b},
            {"max_c", max_c},      {"pass", pass},           {"failures", failures}};
}

std::string field_stem(Side side, std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%02zu", side_name(side), k);
    return buf;
}

json side_report(const ContinuationResult& r) {
    json residuals = json::array(), methods = json::array();
    for (const auto& s : r.iterates) {
        residuals.push_back(s.relative_residual);
        methods.push_back(s.method);
    }
    return {{"eps_history", r.eps_history},  {"cauchy_diffs", r.cauchy_diffs}, {"stop_reason", r.stop_reason},
            {"source_l2", r.source_l2},      {"relative_residuals", residuals}, {"methods", methods}};
}

ContinuationResult fixed_eps_run(const OperatorFactory& assemble, Side side, double eps) {
    ContinuationResult r;
    r.side = side;
    LinearSolver solver;
    r.iterates.push_back(solver.solve(assemble(eps)));
    r.eps_history.push_back(eps);
    r.source_l2 = r.iterates.back().source_l2_unmollified;
    r.stop_reason = "fixed-eps";
    return r;
}

PipelineResult fail(int code, const std::string& message) {
    PipelineResult r;
    r.exit_code = code;
    r.message = message;
    return r;
}

}  // namespace

PipelineResult run_solve(const RunConfig& config) {
    try {
        config.validate();
        const Resolved res = resolve(config);
        const BenchmarkInstance& inst = res.instance;
        fs::create_directories(config.out / "fields");
        // manufactured sources are exact data for one fixed eps: no smoothing
        const AssemblyOptions options{config.scheme, !inst.manufactured_eps};

        // Effective schedule: default floor is max(1e-5, hy).
        double hy = 0.0;
        if (inst.problem) hy = (inst.problem->box.y_max - inst.problem->box.y_min) / (config.ny - 1);
        else hy = std::max(inst.strip->d_plus, inst.strip->d_minus) / config.ny;
        EpsilonSchedule schedule = EpsilonSchedule::standard(hy);
        if (config.eps0) schedule.eps0 = *config.eps0;
        if (config.eps_ratio) schedule.ratio = *config.eps_ratio;
        if (config.eps_floor) schedule.floor = *config.eps_floor;
        else schedule.floor = std::min(schedule.floor, schedule.eps0 * schedule.ratio);  // coarse grids: keep two eps
        if (config.cauchy_tolerance) schedule.cauchy_tolerance = *config.cauchy_tolerance;
        if (!inst.manufactured_eps) schedule.validate();

        std::vector<Side> sides;
        if (inst.plus_valid) sides.push_back(Side::Plus);
        if (inst.minus_valid) sides.push_back(Side::Minus);

        json manifest;
        manifest["tool"] = kToolName;
        manifest["version"] = kToolVersion;
        manifest["source"] = res.source;
        manifest["kind"] = inst.problem ? "domain" : "strip";
        manifest["name"] = inst.name;
        manifest["grid"] = {config.nx, config.ny};
        if (inst.manufactured_eps) {
            manifest["schedule"] = {{"fixed_eps", *inst.manufactured_eps}};
        } else {
            manifest["schedule"] = {{"eps0", schedule.eps0},
                                    {"ratio", schedule.ratio},
                                    {"floor", schedule.floor},
                                    {"cauchy_tolerance", schedule.cauchy_tolerance}};
        }
        manifest["scheme"] = to_string(config.scheme);
        manifest["omega_star"] = config.omega_star;
        manifest["threads"] = config.threads;
        manifest["override_structural"] = config.override_structural;
        json side_names = json::array();
        for (Side s : sides) side_names.push_back(side_name(s));
        manifest["sides"] = side_names;
        manifest["expected"] = inst.expected ? json(inst.expected->to_string()) : json(nullptr);
        manifest["solution_tolerance"] = res.solution_tolerance ? json(*res.solution_tolerance) : json(nullptr);
        json facts = json::array();
        for (const auto& f : inst.facts) {
            facts.push_back({{"name", f.name}, {"value", f.value}, {"tolerance", f.tolerance}, {"source", f.source}});
        }
        manifest["facts"] = facts;
        write_json(config.out / "manifest.json", manifest);

        // Structural conditions.
        bool structural_pass = false;
        json structural;
        std::optional<InterfaceCurve> gamma;
        if (inst.problem) {
            write_json(config.out / "problem.json", problem_to_json(*inst.problem));
            try {
                gamma = extract_interface(inst.problem->phi, 1024, inst.problem->box);
            } catch (const InterfaceError& e) {
                throw StageError(kExitStructural, std::string("interface: ") + e.what());
            }
            const StructuralReport rep = verify_structural_conditions(*inst.problem, *gamma);
            structural = to_json(rep);
            structural_pass = rep.pass();
            if (!structural_pass) structural["failures"] = rep.failures();
        } else {
            const auto& cc = *inst.strip;
            write_json(config.out / "problem.json",
                       {{"kind", "strip"},
                        {"name", cc.name},
                        {"omega", cc.omega.describe()},
                        {"a", cc.a.describe()},
                        {"b", cc.b.describe()},
                        {"c", cc.c.describe()},
                        {"f", cc.f.describe()},
                        {"f_minus", cc.f_minus ? json(cc.f_minus->describe()) : json(nullptr)},
                        {"d_plus", cc.d_plus},
                        {"d_minus", cc.d_minus},
                        {"far_plus", cc.far_plus == FarEdge::Dirichlet ? "dirichlet" : "neumann"},
                        {"far_minus", cc.far_minus == FarEdge::Dirichlet ? "dirichlet" : "neumann"}});
            structural = strip_structural(cc, config.omega_star, structural_pass);
        }
        structural["overridden"] = !structural_pass && config.override_structural;
        write_json(config.out / "structural.json", structural);
        if (!structural_pass && !config.override_structural) {
            std::string why = structural.contains("failures") ? structural["failures"].get<std::string>() : "";
            throw StageError(kExitStructural, "structural conditions fail: " + why);
        }

        // Continuation on each side.
        std::vector<ContinuationResult> runs;
        try {
            if (inst.manufactured_eps) {
                for (Side s : sides) {
                    if (inst.problem) {
                        const auto grid = make_domain_grid(*inst.problem, s, config.nx, config.ny);
                        runs.push_back(fixed_eps_run(
                            [&](double e) { return assemble_domain_operator(*inst.problem, e, s, grid, options); }, s,
                            *inst.manufactured_eps));
                    } else {
                        const auto grid = make_strip_grid(*inst.strip, s, config.nx, config.ny);
                        runs.push_back(fixed_eps_run(
                            [&](double e) { return assemble_strip_operator(*inst.strip, e, s, grid, options); }, s,
                            *inst.manufactured_eps));
                    }
                }
            } else if (sides.size() == 2) {
                SidePair pair = inst.problem
                                    ? run_both_sides(*inst.problem, config.nx, config.ny, schedule, options, config.threads)
                                    : run_both_sides(*inst.strip, config.nx, config.ny, schedule, options, config.threads);
                runs.push_back(std::move(pair.plus));
                runs.push_back(std::move(pair.minus));
            } else {
                for (Side s : sides) {
                    runs.push_back(inst.problem ? run_continuation(*inst.problem, s, config.nx, config.ny, schedule, options)
                                                : run_continuation(*inst.strip, s, config.nx, config.ny, schedule, options));
                }
            }
        } catch (const AssemblyError& e) {
            throw StageError(kExitSolver, std::string("assembly: ") + e.what());
        } catch (const ContinuationError& e) {
            throw StageError(kExitSolver, e.what());
        } catch (const SolverError& e) {
            throw StageError(kExitSolver, e.what());
        }

        json report;
        report["kind"] = manifest["kind"];
        json eps_history, cauchy, stop, detail;
        for (const auto& r : runs) {
            const char* n = side_name(r.side);
            eps_history[n] = r.eps_history;
            cauchy[n] = r.cauchy_diffs;
            stop[n] = r.stop_reason;
            detail[n] = side_report(r);
            for (std::size_t k = 0; k < r.iterates.size(); ++k) {
                write_field(config.out / "fields" / field_stem(r.side, k), r.iterates[k].u);
            }
        }
        report["eps_history"] = eps_history;
        report["cauchy_diffs"] = cauchy;
        report["stop_reason"] = stop;
        report["sides"] = detail;
        report["structural_pass"] = structural_pass;

        // Glue when both sides were solved on compatible lattices.
        report["glued"] = false;
        report["trace_mismatch"] = nullptr;
        if (runs.size() == 2) {
            const GridField& up = runs[0].limit().u;
            const GridField& um = runs[1].limit().u;
            std::shared_ptr<const Grid> full;
            try {
                full = combined_grid(*up.grid, *um.grid);
            } catch (const GlueError& e) {
                report["glue_note"] = e.what();
            }
            if (full) {
                try {
                    const GluedSolution glued = glue_solutions(up, um, full, gamma ? &*gamma : nullptr);
                    write_field(config.out / "u", glued.full);
                    report["glued"] = true;
                    report["trace_mismatch"] = glued.trace_mismatch;
                } catch (const GlueError& e) {
                    write_json(config.out / "report.json", report);
                    throw StageError(kExitSolver, std::string("glue: ") + e.what());
                }
            }
        }
        write_json(config.out / "report.json", report);
        PipelineResult out;
        out.summary = report;
        out.message = "solve bundle written to " + config.out.string();
        return out;
    } catch (const StageError& e) {
        return fail(e.code(), e.what());
    } catch (const ConfigError& e) {
        return fail(kExitConfig, e.what());
    } catch (const ChartError& e) {
        return fail(kExitStructural, e.what());
    } catch (const ProblemError& e) {
        return fail(kExitStructural, e.what());
    } catch (const std::exception& e) {
        return fail(kExitSolver, e.what());
    }
}

PipelineResult run_verify(const fs::path& dir, int residual_tests) {
    try {
        const json manifest = read_json(dir / "manifest.json");
        const json report = read_json(dir / "report.json");
        const bool domain = manifest.at("kind") == "domain";
        const bool conditions = report.at("structural_pass").get<bool>();
        std::optional<ProblemSpec> spec;
        std::optional<InterfaceCurve> gamma;
        if (domain) {
            spec = problem_from_json(read_json(dir / "problem.json"));
            gamma = extract_interface(spec->phi, 1024, spec->box);
        }
        std::optional<FieldExpression> expected;
        if (!manifest.at("expected").is_null()) expected = FieldExpression::parse(manifest["expected"].get<std::string>());

        json verdict;
        bool pass = true;
        json estimates;
        json solution;
        double solution_error = 0.0;
        bool all_cauchy = true;
        for (const auto& name : manifest.at("sides")) {
            const std::string n = name.get<std::string>();
            const Side side = side_from(n);
            const json& sr = report.at("sides").at(n);
            const auto eps = sr.at("eps_history").get<std::vector<double>>();
            all_cauchy = all_cauchy && sr.at("stop_reason") == "cauchy";
            std::vector<EstimateRow> rows;
            GridField last;
            for (std::size_t k = 0; k < eps.size(); ++k) {
                SolveOutput s;
                s.u = read_field(dir / "fields" / field_stem(side, k));
                s.eps = eps[k];
                s.side = side;
                rows.push_back(domain ? domain_estimate_row(s, *spec, *gamma) : strip_estimate_row(s));
                if (k + 1 == eps.size()) last = s.u;
            }
            write_estimates_csv(dir / ("estimates_" + n + ".csv"), rows);
            const EstimateReport rep =
                build_estimate_report(n, rows, sr.at("source_l2").get<double>(), conditions);
            estimates[n] = to_json(rep);
            pass = pass && rep.pass();
            if (expected) {
                const Grid& g = *last.grid;
                const double sgn = side == Side::Plus ? 1.0 : -1.0;
                for (int j = 0; j < g.ny(); ++j) {
                    for (int i = 0; i < g.nx(); ++i) {
                        // cut-cell Dirichlet nodes sit outside the subdomain, off the boundary
                        if (g.type(i, j) == NodeType::Exterior || (domain && g.type(i, j) != NodeType::Active)) continue;
                        const double ref = domain ? (*expected)(g.node(i, j)) : (*expected)(g.x(i), sgn * g.y(j));
                        solution_error = std::max(solution_error, std::abs(last.at(i, j) - ref));
                    }
                }
            }
        }
        verdict["estimates"] = estimates;
        if (domain) verdict["coefficient_norms"] = read_json(dir / "structural.json").at("coefficient_norms");
        if (expected) {
            solution["expected"] = expected->to_string();
            solution["max_error"] = solution_error;
            if (!manifest.at("solution_tolerance").is_null()) {
                const double tol = manifest["solution_tolerance"].get<double>();
                solution["tolerance"] = tol;
                solution["verdict"] = solution_error <= tol ? "pass" : "fail";
                pass = pass && solution_error <= tol;
            } else {
                solution["verdict"] = "reported";
            }
            verdict["solution"] = solution;
        }
        if (domain && report.at("glued").get<bool>()) {
            const GridField u = read_field(dir / "u");
            json residual;
            try {
                std::vector<bool> flags;
                const auto tests = make_test_bumps(*spec, *gamma, *u.grid, residual_tests, &flags);
                const ResidualReport rr = weak_residual(u, *spec, tests, flags);
                residual = to_json(rr);
                residual["bound"] = 1e-3;
                if (!all_cauchy) {
                    residual["verdict"] = "not applicable: continuation did not meet the Cauchy test";
                } else {
                    residual["verdict"] = rr.max <= 1e-3 ? "pass" : "fail";
                    pass = pass && rr.max <= 1e-3;
                }
            } catch (const VerificationError& e) {
                residual["verdict"] = std::string("not applicable: ") + e.what();
            }
            verdict["weak_residual"] = residual;
        }
        verdict["trace_mismatch"] = report.at("trace_mismatch");
        verdict["structural_pass"] = conditions;
        verdict["pass"] = pass;
        write_json(dir / "verdict.json", verdict);
        PipelineResult out;
        out.summary = verdict;
        out.exit_code = pass ? kExitOk : kExitVerification;
        out.message = pass ? "all verdicts pass" : "verification verdict failed";
        return out;
    } catch (const ConfigError& e) {
        return fail(kExitConfig, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(kExitConfig, std::string("malformed bundle: ") + e.what());
    } catch (const VerificationError& e) {
        return fail(kExitVerification, e.what());
    } catch (const std::exception& e) {
        return fail(kExitConfig, e.what());
    }
}

PipelineResult run_pipeline(const RunConfig& config) {
    PipelineResult solve = run_solve(config);
    if (solve.exit_code != kExitOk) return solve;
    return run_verify(config.out, config.residual_tests);
}

PipelineResult run_transform_command(const RunConfig& config, int csv_nx, int csv_ny) {
    try {
        config.validate();
        const Resolved res = resolve(config);
        const BenchmarkInstance& inst = res.instance;
        fs::create_directories(config.out);
        json out;
        if (inst.problem) {
            TransformOptions opt;
            opt.omega_star = config.omega_star;
            const TransformResult tr = run_transform(*inst.problem, opt);
            const auto& info = *tr.canonical.transform;
            out = to_json(info);
            out["kind"] = "domain";
            out["admissible_half_width"] = tr.admissible_half_width;
            double b_err = 0.0;
            for (std::size_t k = 0; k < info.x.size(); ++k) {
                b_err = std::max(b_err, std::abs(tr.canonical.b(info.x[k], 0.0) - info.b0[k]));
            }
            out["max_b_minus_b0"] = b_err;
            write_coefficients_csv(config.out / "coefficients.csv", tr.canonical, csv_nx, csv_ny);
            write_b0_csv(config.out / "b0.csv", tr);
        } else {
            const auto& cc = *inst.strip;
            out["kind"] = "strip";
            double bmin = 1e300, bmax = -1e300;
            for (int i = 0; i < csv_nx; ++i) {
                const double b = cc.b(-std::numbers::pi + 2.0 * std::numbers::pi * i / csv_nx, 0.0);
                bmin = std::min(bmin, b);
                bmax = std::max(bmax, b);
            }
            out["b_at_interface"] = {bmin, bmax};
            if (inst.original_form) {
                // interface of the original variables: y = polar angle pi/2
                out["b0_formula"] = b0_at(*inst.original_form, {0.0, std::numbers::pi / 2});
            }
            write_coefficients_csv(config.out / "coefficients.csv", cc, csv_nx, csv_ny);
        }
        write_json(config.out / "transform.json", out);
        PipelineResult r;
        r.summary = out;
        r.message = "transform written to " + config.out.string();
        return r;
    } catch (const ConfigError& e) {
        return fail(kExitConfig, e.what());
    } catch (const InterfaceError& e) {
        return fail(kExitStructural, e.what());
    } catch (const ChartError& e) {
        return fail(kExitStructural, e.what());
    } catch (const ProblemError& e) {
        return fail(kExitStructural, e.what());
    } catch (const std::exception& e) {
        return fail(kExitSolver, e.what());
    }
}

}  // namespace degen
