#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jst/model.hpp"

// Config file schema, CSV emission with pinned numeric formatting, and a
// dependency-free line-chart SVG writer.

namespace jst {

// Experiment-level configuration mirroring the JSON schema. Optional
// fields remember whether they were present so that parse -> serialize is
// the identity on the document.
struct SweepSpec {
    std::optional<double> max;       // default 0.9 / (lambda N)
    std::optional<int> points;       // default 400
    std::optional<std::string> spacing;  // "hybrid" (default) or "linear"
};

struct SimSpec {
    std::optional<long> jobs;
    std::optional<long> warmup;
    std::optional<std::uint64_t> seed;
    std::optional<int> replications;
};

struct DesignSpec {
    std::optional<double> gamma;  // default 10
    std::optional<double> theta;  // default tail_beta / 2
    std::optional<double> tau;
};

struct OutputSpec {
    std::optional<std::string> csv;
    std::optional<std::string> svg;
};

struct ExperimentConfig {
    SystemConfig system;
    // load was given as rho (Figure-2 convention: lambda = rho / E[X])
    bool rho_given = false;
    double rho = 0;
    // distribution given as a bounded Pareto tail
    bool pareto_given = false;
    // optional profile fields present in the document
    bool profile_a_given = false, profile_b_given = false;
    bool profile_pmm0_given = false, profile_pMM0_given = false;
    bool cost_given = false, cost_kappa_given = false;
    bool lambda_given = false;

    SweepSpec sweep;
    SimSpec sim;
    DesignSpec design;
    OutputSpec output;

    double sweep_max_or_default() const;
    int sweep_points_or_default() const { return sweep.points.value_or(400); }
    double gamma_or_default() const { return design.gamma.value_or(10.0); }
};

enum class ConfigError { None, Malformed, Unstable };

struct ParseResult {
    ConfigError error = ConfigError::None;
    std::string message;
    ExperimentConfig config;

    bool ok() const { return error == ConfigError::None; }
};

ParseResult parse_experiment_config(const std::string& json_text);
ParseResult load_experiment_config(const std::string& path);
std::string serialize_experiment_config(const ExperimentConfig& cfg);

// CSV with a fixed 12-significant-digit numeric format, '.' decimal
// separator, LF line endings; optional "# key=value ..." metadata line
// above the header.
class CsvWriter {
  public:
    explicit CsvWriter(std::string path) : path_(std::move(path)) {}
    void metadata(const std::string& line) { metadata_ = line; }
    void header(const std::vector<std::string>& cols);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& cells);
    void write() const;  // throws std::runtime_error on IO failure
    const std::string& text() const { return body_; }

  private:
    std::string path_;
    std::string metadata_;
    std::string body_;
};

std::string format_number(double v);  // the shared %.12g formatting

// Minimal self-contained SVG line chart (axes, ticks, legend, polylines).
struct SvgSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series, bool log_x);

}  // namespace jst
