#pragma once

// Run configuration, the check report, and the verification suite that
// exercises every module invariant on one configuration.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mqg/io.hpp"
#include "mqg/transport.hpp"

namespace mqg {

struct RunConfig {
    enum class QSource { uniform, matrix, random };

    int n_generators = 2;
    QSource q_source = QSource::uniform;
    double q = 0.0;         ///< uniform value, or q_max for QSource::random
    Mat<double> q_matrix;   ///< QSource::matrix
    std::string q_matrix_path;
    std::uint64_t seed = 1;
    int depth = 4;          ///< d
    double eps = 1.0;
    int neumann = -1;       ///< K; < 0 selects the default order
    int cutoff = -1;        ///< D; < 0 selects d
    double threshold = 0.1; ///< smallness constant c for the q0 scan (external)
    std::string out = ".";
    std::vector<std::string> formats{"json", "csv", "txt"};
    std::map<std::string, double> tolerances; ///< per-check overrides

    /// Throws std::invalid_argument on inconsistent settings.
    void validate() const;
    QSpec<double> qspec() const;
    int effective_cutoff() const { return cutoff < 0 ? depth : cutoff; }
    bool wants(const std::string& format) const;
    io::Json to_json() const;

    /// Applies "key = value" lines; '#' starts a comment.
    void apply_config_text(const std::string& text);
};

enum class CheckStatus { pass, fail, skipped };

struct CheckResult {
    std::string name;
    CheckStatus status = CheckStatus::skipped;
    double max_residual = 0;
    double bound = 0;
    std::string detail;

    double slack() const { return bound - max_residual; }
};

class Report {
public:
    explicit Report(io::Json config = io::Json::object()) : config_(std::move(config)) {}

    /// Throws std::logic_error if the name is already present.
    void add(CheckResult r);
    /// status = residual <= bound
    void add_bounded(const std::string& name, double residual, double bound, std::string detail = {});
    void add_skipped(const std::string& name, std::string reason);

    const std::vector<CheckResult>& checks() const noexcept { return checks_; }
    const CheckResult& at(const std::string& name) const;
    bool passed() const;

    io::Json& diagnostics() noexcept { return diagnostics_; }
    io::Json to_json() const;

private:
    io::Json config_;
    std::vector<CheckResult> checks_;
    io::Json diagnostics_ = io::Json::object();
};

std::string to_string(CheckStatus s);

/// Names of all checks run_verification emits, in report order.
const std::vector<std::string>& verification_check_names();

/// The full identity and bound suite on the configured Q and depth.
Report run_verification(const RunConfig& config);

} // namespace mqg
