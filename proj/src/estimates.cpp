#include "degen/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "degen/norms.hpp"

namespace degen {

EstimateRow strip_estimate_row(const SolveOutput& s) {
    EstimateRow r;
    r.eps = s.eps;
    const NormReport n = discrete_norms(s.u);
    r.l2 = n.l2;
    r.h1 = n.h1;
    const double eps = s.eps;
    r.wh2 = weighted_h2_norm(s.u, [eps](Vec2 p) { return p.y + eps; });
    r.eps_flux = strip_flux(s.u, eps);
    return r;
}

EstimateRow domain_estimate_row(const SolveOutput& s, const ProblemSpec& spec, const InterfaceCurve& gamma) {
    EstimateRow r;
    r.eps = s.eps;
    const NormReport n = discrete_norms(s.u);
    r.l2 = n.l2;
    r.h1 = n.h1;
    const double shift = s.side == Side::Plus ? s.eps : -s.eps;
    r.wh2 = weighted_h2_norm(s.u, [&](Vec2 p) { return spec.phi(p) + shift; });
    r.eps_flux = domain_flux(s.u, gamma, s.eps, s.side);
    return r;
}

std::vector<EstimateRow> strip_estimate_rows(const ContinuationResult& run) {
    std::vector<EstimateRow> rows;
    for (const auto& s : run.iterates) rows.push_back(strip_estimate_row(s));
    return rows;
}

std::vector<EstimateRow> domain_estimate_rows(const ContinuationResult& run, const ProblemSpec& spec,
                                              const InterfaceCurve& gamma) {
    std::vector<EstimateRow> rows;
    for (const auto& s : run.iterates) rows.push_back(domain_estimate_row(s, spec, gamma));
    return rows;
}

namespace {

std::size_t distinct_eps(const std::vector<EstimateRow>& rows) {
    std::set<double> s;
    for (const auto& r : rows) s.insert(r.eps);
    return s.size();
}

RatioCheck ratio_check(std::string quantity, const std::vector<EstimateRow>& rows, double source_l2,
                       bool conditions_hold, double EstimateRow::*field) {
    if (distinct_eps(rows) < 4) {
        throw VerificationError(quantity + " check needs at least 4 distinct eps values");
    }
    RatioCheck c;
    c.quantity = std::move(quantity);
    double norm_max = 0.0;
    for (const auto& r : rows) {
        c.eps.push_back(r.eps);
        norm_max = std::max(norm_max, r.*field);
    }
    if (source_l2 == 0.0) {
        c.ratios.assign(rows.size(), 0.0);
        c.spread = norm_max == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
        c.verdict = norm_max == 0.0 ? "pass (vacuous)" : "fail";
        return c;
    }
    for (const auto& r : rows) c.ratios.push_back(r.*field / source_l2);
    const auto [lo, hi] = std::minmax_element(c.ratios.begin(), c.ratios.end());
    c.spread = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
    if (!conditions_hold) c.verdict = "not applicable: conditions violated";
    else c.verdict = c.spread <= kRatioBound ? "pass" : "fail";
    return c;
}

}  // namespace

RatioCheck uniform_h1_check(const std::vector<EstimateRow>& rows, double source_l2, bool conditions_hold) {
    return ratio_check("h1", rows, source_l2, conditions_hold, &EstimateRow::h1);
}

RatioCheck weighted_h2_check(const std::vector<EstimateRow>& rows, double source_l2, bool conditions_hold) {
    return ratio_check("weighted_h2", rows, source_l2, conditions_hold, &EstimateRow::wh2);
}

FluxFit flux_decay_fit(const std::vector<EstimateRow>& rows) {
    if (distinct_eps(rows) < 5) throw VerificationError("flux decay fit needs at least 5 distinct eps values");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& r : rows) {
        if (!(r.eps > 0.0)) throw VerificationError("flux decay fit needs positive eps");
        lo = std::min(lo, r.eps);
        hi = std::max(hi, r.eps);
    }
    if (std::log10(hi / lo) < 2.0 - 1e-9) throw VerificationError("flux decay fit needs eps spanning two decades");
    FluxFit fit;
    fit.samples = rows.size();
    const bool all_zero = std::all_of(rows.begin(), rows.end(), [](const EstimateRow& r) { return r.eps_flux == 0.0; });
    if (all_zero) {
        fit.trivial = true;
        fit.verdict = "pass (flux identically zero)";
        return fit;
    }
    if (std::any_of(rows.begin(), rows.end(), [](const EstimateRow& r) { return !(r.eps_flux > 0.0); })) {
        fit.verdict = "fail: flux vanishes at some eps only";
        return fit;
    }
    const double n = static_cast<double>(rows.size());
    double mx = 0.0, my = 0.0;
    for (const auto& r : rows) mx += std::log(r.eps) / n, my += std::log(r.eps_flux) / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& r : rows) {
        const double dx = std::log(r.eps) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(r.eps_flux) - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (const auto& r : rows) {
        const double e = std::log(r.eps_flux) - fit.intercept - fit.slope * std::log(r.eps);
        ssr += e * e;
    }
    fit.slope_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
    fit.verdict = fit.slope >= kFluxSlopeMin ? "pass" : "fail";
    return fit;
}

EstimateReport build_estimate_report(std::string side, std::vector<EstimateRow> rows, double source_l2,
                                     bool conditions_hold) {
    EstimateReport rep;
    rep.side = std::move(side);
    rep.rows = std::move(rows);
    if (distinct_eps(rep.rows) >= 4) {
        rep.h1 = uniform_h1_check(rep.rows, source_l2, conditions_hold);
        rep.wh2 = weighted_h2_check(rep.rows, source_l2, conditions_hold);
    } else {
        for (RatioCheck* c : {&rep.h1, &rep.wh2}) c->verdict = "not applicable: fewer than 4 eps values";
        rep.h1.quantity = "h1";
        rep.wh2.quantity = "weighted_h2";
    }
    try {
        rep.flux = flux_decay_fit(rep.rows);
        rep.flux_checked = true;
    } catch (const VerificationError& e) {
        rep.flux_note = e.what();
    }
    return rep;
}

nlohmann::json to_json(const RatioCheck& r) {
    nlohmann::json j;
    j["quantity"] = r.quantity;
    j["eps"] = r.eps;
    j["ratios"] = r.ratios;
    j["spread"] = std::isfinite(r.spread) ? nlohmann::json(r.spread) : nlohmann::json("inf");
    j["bound"] = kRatioBound;
    j["verdict"] = r.verdict;
    return j;
}

nlohmann::json to_json(const FluxFit& f) {
    return {{"slope", f.slope},       {"intercept", f.intercept}, {"slope_stderr", f.slope_stderr},
            {"samples", f.samples},   {"trivial", f.trivial},     {"min_slope", kFluxSlopeMin},
            {"verdict", f.verdict}};
}

nlohmann::json to_json(const EstimateReport& r) {
    nlohmann::json j;
    j["side"] = r.side;
    j["h1"] = to_json(r.h1);
    j["weighted_h2"] = to_json(r.wh2);
    if (r.flux_checked) j["flux_decay"] = to_json(r.flux);
    else j["flux_decay"] = {{"verdict", "not applicable"}, {"note", r.flux_note}};
    j["pass"] = r.pass();
    return j;
}

void write_estimates_csv(const std::filesystem::path& path, const std::vector<EstimateRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "eps,l2,h1,wh2,eps_flux\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.eps, r.l2, r.h1, r.wh2, r.eps_flux);
        out << buf;
    }
}

std::vector<EstimateRow> read_estimates_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw VerificationError("cannot read " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != "eps,l2,h1,wh2,eps_flux") throw VerificationError(path.string() + ": unexpected header");
    std::vector<EstimateRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        EstimateRow r;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &r.eps, &r.l2, &r.h1, &r.wh2, &r.eps_flux) != 5) {
            throw VerificationError(path.string() + ": malformed row '" + line + "'");
        }
        rows.push_back(r);
    }
    return rows;
}

}  // namespace degen
