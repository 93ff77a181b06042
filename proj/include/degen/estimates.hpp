#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "degen/continuation.hpp"
#include "degen/interface.hpp"
#include "degen/problem.hpp"

namespace degen {

/// Input that cannot support the requested check (too few samples, a
/// single grid, a non-nested refinement family).
class VerificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One row of the estimate table.
struct EstimateRow {
    double eps = 0.0;
    double l2 = 0.0;
    double h1 = 0.0;
    double wh2 = 0.0;       ///< ||(phi +- eps) u||_{H^2}, (y' + eps) on strips
    double eps_flux = 0.0;  ///< eps ||d_n u||_{L2(Gamma)}
};

/// Rows for a strip side; the local row coordinate is y' = |y|.
[[nodiscard]] EstimateRow strip_estimate_row(const SolveOutput& s);
[[nodiscard]] EstimateRow domain_estimate_row(const SolveOutput& s, const ProblemSpec& spec,
                                              const InterfaceCurve& gamma);
[[nodiscard]] std::vector<EstimateRow> strip_estimate_rows(const ContinuationResult& run);
[[nodiscard]] std::vector<EstimateRow> domain_estimate_rows(const ContinuationResult& run, const ProblemSpec& spec,
                                                            const InterfaceCurve& gamma);

/// Boundedness proxy: ratio r(eps) = norm / ||F||_{L2}, pass iff
/// max r / min r <= 3. F = 0 passes by vacuity; when the structural
/// conditions fail the verdict is "not applicable".
struct RatioCheck {
    std::string quantity;
    std::vector<double> eps;
    std::vector<double> ratios;
    double spread = 0.0;  ///< max r / min r
    std::string verdict;  ///< "pass", "fail", "pass (vacuous)", "not applicable: conditions violated"
    [[nodiscard]] bool pass() const { return verdict.rfind("pass", 0) == 0 || verdict.rfind("not applicable", 0) == 0; }
};

constexpr double kRatioBound = 3.0;

/// Needs at least 4 distinct eps; throws VerificationError otherwise.
[[nodiscard]] RatioCheck uniform_h1_check(const std::vector<EstimateRow>& rows, double source_l2,
                                          bool conditions_hold = true);
[[nodiscard]] RatioCheck weighted_h2_check(const std::vector<EstimateRow>& rows, double source_l2,
                                           bool conditions_hold = true);

/// Least-squares fit of log(eps_flux) against log(eps).
struct FluxFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::size_t samples = 0;
    bool trivial = false;  ///< flux identically zero
    std::string verdict;
    [[nodiscard]] bool pass() const { return verdict.rfind("pass", 0) == 0; }
};

constexpr double kFluxSlopeMin = 0.45;

/// Needs at least 5 eps values spanning two decades; throws VerificationError.
[[nodiscard]] FluxFit flux_decay_fit(const std::vector<EstimateRow>& rows);

struct EstimateReport {
    std::string side;
    std::vector<EstimateRow> rows;
    RatioCheck h1;
    RatioCheck wh2;
    FluxFit flux;
    bool flux_checked = false;  ///< false when the sweep is too short for a fit
    std::string flux_note;
    [[nodiscard]] bool pass() const { return h1.pass() && wh2.pass() && (!flux_checked || flux.pass()); }
};

/// Runs every check the rows support; insufficient samples are recorded as
/// notes rather than thrown.
[[nodiscard]] EstimateReport build_estimate_report(std::string side, std::vector<EstimateRow> rows, double source_l2,
                                                   bool conditions_hold);

[[nodiscard]] nlohmann::json to_json(const RatioCheck& r);
[[nodiscard]] nlohmann::json to_json(const FluxFit& f);
[[nodiscard]] nlohmann::json to_json(const EstimateReport& r);
/// Columns eps,l2,h1,wh2,eps_flux.
void write_estimates_csv(const std::filesystem::path& path, const std::vector<EstimateRow>& rows);
[[nodiscard]] std::vector<EstimateRow> read_estimates_csv(const std::filesystem::path& path);

}  // namespace degen
