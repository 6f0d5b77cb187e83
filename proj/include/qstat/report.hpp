#pragma once

#include "qstat/dataset.hpp"
#include "qstat/model_selection.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qstat {

struct AnalysisOptions {
    FitOptions fit;
    /// Inclusive index range applied to every record before fitting.
    std::optional<std::pair<int, int>> mask;
};

struct AnalysisRow {
    ConceptSpec spec;
    CountVector data; // as fitted, after masking
    FitResult fit_mb;
    FitResult fit_be;
    ModelComparison comparison;
};

struct RecordFailure {
    int id = 0;
    std::string message;
};

struct AnalysisBatch {
    std::vector<AnalysisRow> rows;
    std::vector<RecordFailure> failures;
};

/// Fits both models to one record and compares them.
AnalysisRow analyze_record(const Record& record, const Thresholds& thresholds = {}, const AnalysisOptions& options = {});

/// Per-record analysis in input order. A failing record is reported in
/// `failures` and does not stop the batch. Throws on an empty input.
AnalysisBatch analyze(std::span<const Record> records, const Thresholds& thresholds = {},
                      const AnalysisOptions& options = {});

enum class ReportFormat { Tsv, Json, Markdown };

ReportFormat parse_report_format(std::string_view text);

/// Two-decimal rendering used in every text report; never prints "-0.00".
std::string format_fixed2(double value);

/// Columns: id, P_MB, R2_MB, P_BE, R2_BE, delta_BIC, verdict. JSON keeps full
/// precision together with each record's counts so it loads back as a dataset.
std::string emit_report(std::span<const AnalysisRow> rows, ReportFormat format, const Thresholds& thresholds = {});

/// Rows restored from a JSON report.
std::vector<AnalysisRow> parse_report_json(std::string_view text);

/// CSV `n,empirical_freq,mb_fit,be_fit` for n = 0..N. Excluded indices leave
/// the empirical column empty.
std::string emit_plotdata(const AnalysisRow& row);

} // namespace qstat
