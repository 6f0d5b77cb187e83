#include "qstat/report.hpp"

#include "qstat/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>

namespace qstat {

namespace {

using json = nlohmann::json;

std::string format_r2(const std::optional<double>& r2)
{
    return r2 ? format_fixed2(*r2) : "NA";
}

std::string_view winner_name(Winner w)
{
    switch (w) {
    case Winner::MB:
        return "MB";
    case Winner::BE:
        return "BE";
    case Winner::Tie:
        return "Tie";
    }
    return "Tie";
}

Winner parse_winner(std::string_view s)
{
    if (s == "MB")
        return Winner::MB;
    if (s == "BE")
        return Winner::BE;
    if (s == "Tie")
        return Winner::Tie;
    throw DataError(fmt::format("unknown winner '{}'", s));
}

std::string_view strength_name(Strength s)
{
    switch (s) {
    case Strength::Weak:
        return "Weak";
    case Strength::Positive:
        return "Positive";
    case Strength::Strong:
        return "Strong";
    }
    return "Weak";
}

Strength parse_strength(std::string_view s)
{
    if (s == "Weak")
        return Strength::Weak;
    if (s == "Positive")
        return Strength::Positive;
    if (s == "Strong")
        return Strength::Strong;
    throw DataError(fmt::format("unknown strength '{}'", s));
}

json optional_number(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

std::optional<double> read_optional(const json& v)
{
    if (v.is_null())
        return std::nullopt;
    return v.get<double>();
}

json fit_to_json(const FitResult& fit)
{
    return {{"p1", fit.params.p1()},
            {"rss", fit.rss},
            {"r_squared", optional_number(fit.r_squared)},
            {"n_points", fit.n_points}};
}

FitResult fit_from_json(const json& j, Statistics kind, const CountVector& data)
{
    return FitResult{ModelParams(kind, j.at("p1").get<double>()), j.at("rss").get<double>(),
                     read_optional(j.at("r_squared")), j.at("n_points").get<int>(), data.included_indices()};
}

std::vector<std::string> report_cells(const AnalysisRow& row, const Thresholds& thresholds)
{
    return {fmt::format("{}", row.spec.id),
            format_fixed2(row.fit_mb.params.p1()),
            format_r2(row.fit_mb.r_squared),
            format_fixed2(row.fit_be.params.p1()),
            format_r2(row.fit_be.r_squared),
            format_fixed2(row.comparison.delta_bic),
            verdict(row.comparison.delta_bic, thresholds)};
}

const std::vector<std::string> kReportColumns = {"id", "P_MB", "R2_MB", "P_BE", "R2_BE", "delta_BIC", "verdict"};

} // namespace

AnalysisRow analyze_record(const Record& record, const Thresholds& thresholds, const AnalysisOptions& options)
{
    record.spec.validate();
    CountVector data = options.mask ? record.data.masked(options.mask->first, options.mask->second) : record.data;
    FitResult fit_mb = fit(data, Statistics::MB, options.fit);
    FitResult fit_be = fit(data, Statistics::BE, options.fit);
    ModelComparison comparison = compare(fit_mb, fit_be, thresholds);
    return AnalysisRow{record.spec, std::move(data), std::move(fit_mb), std::move(fit_be), comparison};
}

AnalysisBatch analyze(std::span<const Record> records, const Thresholds& thresholds, const AnalysisOptions& options)
{
    if (records.empty())
        throw EmptyDataError("analyze: no records");
    AnalysisBatch batch;
    for (const auto& record : records) {
        try {
            batch.rows.push_back(analyze_record(record, thresholds, options));
        } catch (const std::exception& e) {
            batch.failures.push_back(RecordFailure{record.spec.id, e.what()});
        }
    }
    return batch;
}

ReportFormat parse_report_format(std::string_view text)
{
    if (text == "tsv")
        return ReportFormat::Tsv;
    if (text == "json")
        return ReportFormat::Json;
    if (text == "markdown" || text == "md")
        return ReportFormat::Markdown;
    throw DomainError(fmt::format("unknown report format '{}'", text));
}

std::string format_fixed2(double value)
{
    std::string text = fmt::format("{:.2f}", value);
    if (text == "-0.00")
        text = "0.00";
    return text;
}

std::string emit_report(std::span<const AnalysisRow> rows, ReportFormat format, const Thresholds& thresholds)
{
    if (rows.empty())
        throw EmptyDataError("emit_report: no rows");

    std::string out;
    switch (format) {
    case ReportFormat::Tsv:
        out = fmt::format("{}\n", fmt::join(kReportColumns, "\t"));
        for (const auto& row : rows)
            out += fmt::format("{}\n", fmt::join(report_cells(row, thresholds), "\t"));
        return out;

    case ReportFormat::Markdown:
        out = fmt::format("| {} |\n", fmt::join(kReportColumns, " | "));
        out += "|---:|---:|---:|---:|---:|---:|:---|\n";
        for (const auto& row : rows)
            out += fmt::format("| {} |\n", fmt::join(report_cells(row, thresholds), " | "));
        return out;

    case ReportFormat::Json: {
        json doc = {{"thresholds", {{"weak", thresholds.weak}, {"strong", thresholds.strong}, {"tie", thresholds.tie}}},
                    {"records", json::array()}};
        for (const auto& row : rows) {
            json cells = json::array();
            for (int n = 0; n <= row.data.total_entities(); ++n) {
                auto it = row.data.counts().find(n);
                cells.push_back(it == row.data.counts().end() ? json(nullptr) : json(it->second));
            }
            doc["records"].push_back({{"id", row.spec.id},
                                      {"N", row.spec.total},
                                      {"concept", row.spec.concept_name},
                                      {"state1", row.spec.state1_label},
                                      {"state2", row.spec.state2_label},
                                      {"counts", cells},
                                      {"mb", fit_to_json(row.fit_mb)},
                                      {"be", fit_to_json(row.fit_be)},
                                      {"delta_bic", row.comparison.delta_bic},
                                      {"winner", winner_name(row.comparison.winner)},
                                      {"strength", strength_name(row.comparison.strength)},
                                      {"r_squared_winner", optional_number(row.comparison.r_squared_winner)},
                                      {"verdict", verdict(row.comparison.delta_bic, thresholds)}});
        }
        return doc.dump(2) + "\n";
    }
    }
    throw DomainError("emit_report: unknown format");
}

std::vector<AnalysisRow> parse_report_json(std::string_view text)
{
    const auto records = parse_dataset_json(text);
    const json doc = json::parse(text);
    std::vector<AnalysisRow> rows;
    rows.reserve(records.size());
    for (size_t i = 0; i < records.size(); ++i) {
        const json& item = doc["records"][i];
        try {
            AnalysisRow row{records[i].spec, records[i].data,
                            fit_from_json(item.at("mb"), Statistics::MB, records[i].data),
                            fit_from_json(item.at("be"), Statistics::BE, records[i].data), ModelComparison{}};
            row.comparison.delta_bic = item.at("delta_bic").get<double>();
            row.comparison.winner = parse_winner(item.at("winner").get<std::string>());
            row.comparison.strength = parse_strength(item.at("strength").get<std::string>());
            row.comparison.r_squared_winner = read_optional(item.at("r_squared_winner"));
            rows.push_back(std::move(row));
        } catch (const json::exception& e) {
            throw DataError(fmt::format("records[{}]: {}", i, e.what()));
        }
    }
    return rows;
}

std::string emit_plotdata(const AnalysisRow& row)
{
    const int total = row.data.total_entities();
    const auto freq = to_frequencies(row.data);
    const auto mb = pmf_vector(Statistics::MB, total, row.fit_mb.params.p1());
    const auto be = pmf_vector(Statistics::BE, total, row.fit_be.params.p1());

    std::string out = "n,empirical_freq,mb_fit,be_fit\n";
    auto freq_it = freq.begin();
    for (int n = 0; n <= total; ++n) {
        std::string empirical;
        if (row.data.counts().contains(n))
            empirical = fmt::format("{:.17g}", *freq_it++);
        out += fmt::format("{},{},{:.17g},{:.17g}\n", n, empirical, mb[static_cast<size_t>(n)],
                           be[static_cast<size_t>(n)]);
    }
    return out;
}

} // namespace qstat
