#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "subscan/detect.hpp"
#include "subscan/model.hpp"
#include "subscan/perm.hpp"

namespace subscan {

enum class ExperimentMode { NetBonferroni, UpperBound };

std::string_view to_string(ExperimentMode mode) noexcept;
ExperimentMode parse_mode(std::string_view name);

/// Simulation sweep over signal levels expressed as multiples of theta_crit.
/// Every field has a default and can be overridden from a JSON document.
struct ExperimentConfig {
    NoiseFamily family{FamilyKind::Gaussian};
    std::size_t M = 200;
    std::size_t N = 100;
    std::vector<SizePair> sizes{{10, 15}, {30, 10}};
    std::vector<PermutationKind> kinds{PermutationKind::Unidimensional, PermutationKind::Bidimensional};
    std::uint64_t B = 500;
    std::size_t reps = 100;
    std::vector<double> multipliers{0.625, 0.75, 0.875, 1.0, 1.125, 1.25, 1.375, 1.5};
    unsigned kM = 0;  // 0 = default_k(M)
    unsigned kN = 0;  // 0 = default_k(N)
    std::uint64_t seed = 20240101;
    int restarts = 20;
    int max_iters = 100;
    bool exact_scan = false;
    bool share_permutations = true;
    double alpha = 0.05;
    ExperimentMode mode = ExperimentMode::NetBonferroni;

    // Execution settings; not part of the result and never echoed into the CSV.
    unsigned threads = 0;
    bool timing = true;
    std::string output_csv;
    std::string output_svg;

    unsigned effective_kM() const;
    unsigned effective_kN() const;

    /// Throws InvalidParameter describing the first invalid field.
    void validate() const;

    static ExperimentConfig from_json(const std::string& text);
    /// Result-determining fields only (execution settings excluded).
    std::string to_json() const;

    std::size_t expected_rows() const { return multipliers.size() * sizes.size() * kinds.size() * reps; }
};

struct ResultRow {
    FamilyKind family = FamilyKind::Gaussian;
    std::size_t M = 0, N = 0, m = 0, n = 0;
    PermutationKind kind = PermutationKind::Bidimensional;
    double multiplier = 0.0;
    double theta = 0.0;
    std::size_t replicate = 0;
    std::uint64_t B = 0;
    unsigned kM = 0, kN = 0;
    std::size_t net_rows = 0, net_cols = 0;  // |S_kM(M)|, |S_kN(N)|
    double pvalue = 1.0;                     // corrected p-value or single-pair upper bound
    double floor = 0.0;                      // correction factor / (B + 1)
    double wall_ms = 0.0;                    // 0 when timing is off
    std::uint64_t seed = 0;  // instance seed

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// Writes the self-describing CSV preamble: comment lines echoing the
/// effective configuration, then the column header.
void write_csv_header(std::ostream& out, const ExperimentConfig& cfg);
void write_csv_row(std::ostream& out, const ResultRow& row, bool timing);
std::string serialize_rows(const std::vector<ResultRow>& rows, bool timing);

/// Parses the CSV written by run_experiment. Comment lines are skipped; the
/// wall_ms column is optional. Throws ParseError with the line number.
std::vector<ResultRow> parse_csv(std::istream& in);
std::vector<ResultRow> parse_csv_file(const std::filesystem::path& path);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Runs every (size, kind, multiplier, replicate) cell. Cells are
/// independent tasks; rows are streamed to `csv` (when non-null) in cell
/// order by a single writer, so output is identical for any thread count.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, std::ostream* csv = nullptr,
                                      const ProgressFn& progress = {});

/// Convenience: runs and writes cfg.output_csv. Throws Error if the file
/// cannot be opened.
std::vector<ResultRow> run_experiment_to_file(const ExperimentConfig& cfg, const ProgressFn& progress = {});

/// Per-multiplier summary of one (m, n, kind) panel.
struct PanelPoint {
    double multiplier = 0.0;
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

struct Panel {
    std::size_t m = 0, n = 0;
    PermutationKind kind = PermutationKind::Bidimensional;
    double floor = 0.0;
    std::vector<PanelPoint> points;
};

std::vector<Panel> summarize(const std::vector<ResultRow>& rows);

double median(std::vector<double> values);

/// SVG document (16:9 viewBox) with one panel per (size, kind): median line,
/// min-max band, floor line, and a reference line at multiplier 1.
std::string render_svg(const std::vector<ResultRow>& rows);

void emit_plot(const std::filesystem::path& csv_path, const std::filesystem::path& svg_path);

}  // namespace subscan
