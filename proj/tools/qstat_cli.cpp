// qstat: fit MB / BE occupancy models to count data and report which fits.
//
//   qstat fit       --input data.csv --model mb|be|both [--mask lo..hi]
//   qstat analyze   --input data.csv --output report.tsv --format tsv|json|markdown
//   qstat simulate  --kind mb|be --n 11 --p1 0.5 --draws 1000000 --seed 42
//   qstat plotdata  --input data.csv --id 1 --output curves.csv
//   qstat synth     --params params.csv --draws 88 --seed 1 --output data.csv
//   qstat webcount  --pairs pairs.csv --mode fixture --fixture hits.json
//   qstat webfixture --pairs pairs.csv --scenario scenario.csv --output hits.json
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include "qstat/errors.hpp"
#include "qstat/montecarlo.hpp"
#include "qstat/report.hpp"
#include "qstat/webcount.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <iostream>
#include <memory>

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::pair<int, int> parse_mask(const std::string& text)
{
    const auto dots = text.find("..");
    if (dots == std::string::npos)
        throw UsageError(fmt::format("--mask expects lo..hi, got '{}'", text));
    try {
        return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
    } catch (const std::exception&) {
        throw UsageError(fmt::format("--mask expects integers, got '{}'", text));
    }
}

void write_output(const std::string& path, const std::string& content)
{
    if (path.empty() || path == "-")
        std::cout << content;
    else
        qstat::write_file(path, content);
}

std::vector<qstat::Record> load_input(const std::string& path, const std::string& format)
{
    if (format.empty())
        return qstat::load_dataset(path);
    return qstat::load_dataset(path, qstat::parse_data_format(format));
}

std::string r2_text(const std::optional<double>& r2)
{
    return r2 ? fmt::format("{:.6f}", *r2) : "NA";
}

void report_failures(const std::vector<qstat::RecordFailure>& failures)
{
    for (const auto& f : failures)
        std::cerr << fmt::format("record {}: {}\n", f.id, f.message);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Maxwell-Boltzmann vs Bose-Einstein occupancy fits for two-state count data"};
    app.require_subcommand(1);

    // Shared fit flags.
    std::string input;
    std::string input_format;
    std::string mask_text;
    bool raw_counts = false;
    bool renormalize_mask = false;
    auto add_fit_flags = [&](CLI::App* cmd) {
        cmd->add_option("--input", input, "Dataset (CSV or JSON)")->required()->check(CLI::ExistingFile);
        cmd->add_option("--input-format", input_format, "csv|json (default: from extension)");
        cmd->add_option("--mask", mask_text, "Fit only occupancy indices lo..hi");
        cmd->add_flag("--raw-counts", raw_counts, "Fit raw counts instead of relative frequencies");
        cmd->add_flag("--renormalize-mask", renormalize_mask, "Renormalise model pmf over the mask");
    };
    auto analysis_options = [&] {
        qstat::AnalysisOptions options;
        options.fit.raw_counts = raw_counts;
        options.fit.renormalize_mask = renormalize_mask;
        if (!mask_text.empty())
            options.mask = parse_mask(mask_text);
        return options;
    };

    qstat::Thresholds thresholds;
    auto add_threshold_flags = [&](CLI::App* cmd) {
        cmd->add_option("--t-weak", thresholds.weak, "|ΔBIC| below this is weak")->capture_default_str();
        cmd->add_option("--t-strong", thresholds.strong, "|ΔBIC| above this is strong")->capture_default_str();
    };

    std::string output;

    auto* fit_cmd = app.add_subcommand("fit", "Fit MB and/or BE to every record");
    add_fit_flags(fit_cmd);
    std::string model = "both";
    fit_cmd->add_option("--model", model, "mb|be|both")->check(CLI::IsMember({"mb", "be", "both"}));
    fit_cmd->add_option("--output", output, "Output file (default stdout)");

    auto* analyze_cmd = app.add_subcommand("analyze", "Fit both models, compare by ΔBIC, emit a report");
    add_fit_flags(analyze_cmd);
    add_threshold_flags(analyze_cmd);
    std::string report_format = "tsv";
    analyze_cmd->add_option("--output", output, "Report file (default stdout)");
    analyze_cmd->add_option("--format", report_format, "tsv|json|markdown")
        ->check(CLI::IsMember({"tsv", "json", "markdown"}));

    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo occupancy histogram");
    std::string kind_text = "mb";
    int total = 11;
    double p1 = 0.5;
    std::uint64_t draws = 1000000;
    std::uint64_t seed = 42;
    simulate_cmd->add_option("--kind", kind_text, "mb (pick process) | be (pmf sampling)")
        ->check(CLI::IsMember({"mb", "be"}));
    simulate_cmd->add_option("--n", total, "Entity count N")->check(CLI::Range(1, 100000));
    simulate_cmd->add_option("--p1", p1, "Probability of state 1")->check(CLI::Range(0.0, 1.0));
    simulate_cmd->add_option("--draws", draws, "Number of trials")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--seed", seed, "Generator seed");
    simulate_cmd->add_option("--output", output, "Histogram CSV (default stdout)");

    auto* plot_cmd = app.add_subcommand("plotdata", "Empirical frequencies with fitted MB and BE curves");
    add_fit_flags(plot_cmd);
    int plot_id = 0;
    plot_cmd->add_option("--id", plot_id, "Record id")->required();
    plot_cmd->add_option("--output", output, "Curve CSV (default stdout)");

    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset from known parameters");
    std::string concepts_path;
    std::string params_path;
    double scale = 1.0;
    synth_cmd->add_option("--concepts", concepts_path, "Concept list CSV (default: built-in 14 concepts)")
        ->check(CLI::ExistingFile);
    synth_cmd->add_option("--params", params_path, "id,kind,p1 table")->required()->check(CLI::ExistingFile);
    synth_cmd->add_option("--draws", draws, "Multinomial draws per record; 0 = noiseless")->capture_default_str();
    synth_cmd->add_option("--scale", scale, "Total per record when noiseless");
    synth_cmd->add_option("--seed", seed, "Generator seed");
    std::string synth_format = "csv";
    synth_cmd->add_option("--format", synth_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    synth_cmd->add_option("--output", output, "Dataset file (default stdout)");

    auto* web_cmd = app.add_subcommand("webcount", "Phrase hit counts per occupancy state, fitted per pair and N");
    std::string pairs_path;
    qstat::web::WebQuery query;
    std::string mode = "fixture";
    std::string fixture_path;
    std::string cache_path;
    double rate = 1.0;
    int k_max = -1;
    web_cmd->add_option("--pairs", pairs_path, "j,singular1,plural1,singular2,plural2 (default: built-in pairs)")
        ->check(CLI::ExistingFile);
    web_cmd->add_option("--n-min", query.n_min)->capture_default_str();
    web_cmd->add_option("--n-max", query.n_max)->capture_default_str();
    web_cmd->add_option("--k-min", query.k_min)->capture_default_str();
    web_cmd->add_option("--k-max", k_max, "Upper k (default N)");
    web_cmd->add_option("--mode", mode, "live|fixture")->check(CLI::IsMember({"live", "fixture"}));
    web_cmd->add_option("--fixture", fixture_path, "Phrase -> hits JSON (fixture mode)")->check(CLI::ExistingFile);
    web_cmd->add_option("--cache", cache_path, "JSON-lines hit cache");
    web_cmd->add_option("--rate", rate, "Max live requests per second")->capture_default_str();
    web_cmd->add_option("--output", output, "Report TSV (default stdout)");
    add_threshold_flags(web_cmd);

    auto* webfix_cmd = app.add_subcommand("webfixture", "Synthesise a phrase -> hits fixture from a scenario");
    std::string scenario_path;
    webfix_cmd->add_option("--pairs", pairs_path)->check(CLI::ExistingFile);
    webfix_cmd->add_option("--scenario", scenario_path, "j,N,kind,p1,total_hits,noise")
        ->required()
        ->check(CLI::ExistingFile);
    webfix_cmd->add_option("--k-min", query.k_min)->capture_default_str();
    webfix_cmd->add_option("--seed", seed);
    webfix_cmd->add_option("--output", output, "Fixture JSON (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (fit_cmd->parsed()) {
            const auto records = load_input(input, input_format);
            const auto options = analysis_options();
            std::string out = "id\tmodel\tp1\trss\tr2\tn_points\n";
            int failures = 0;
            for (const auto& record : records) {
                try {
                    const auto data = options.mask ? record.data.masked(options.mask->first, options.mask->second)
                                                   : record.data;
                    for (auto kind : {qstat::Statistics::MB, qstat::Statistics::BE}) {
                        if (model != "both" && model != (kind == qstat::Statistics::MB ? "mb" : "be"))
                            continue;
                        const auto fit = qstat::fit(data, kind, options.fit);
                        out += fmt::format("{}\t{}\t{:.6f}\t{:.6e}\t{}\t{}\n", record.spec.id,
                                           qstat::to_string(kind), fit.params.p1(), fit.rss, r2_text(fit.r_squared),
                                           fit.n_points);
                    }
                } catch (const std::exception& e) {
                    ++failures;
                    std::cerr << fmt::format("record {}: {}\n", record.spec.id, e.what());
                }
            }
            write_output(output, out);
            return failures == 0 ? 0 : kDataError;
        }

        if (analyze_cmd->parsed()) {
            const auto records = load_input(input, input_format);
            const auto batch = qstat::analyze(records, thresholds, analysis_options());
            report_failures(batch.failures);
            if (!batch.rows.empty())
                write_output(output, qstat::emit_report(batch.rows, qstat::parse_report_format(report_format),
                                                        thresholds));
            return batch.failures.empty() ? 0 : kDataError;
        }

        if (simulate_cmd->parsed()) {
            const auto kind = qstat::parse_statistics(kind_text);
            const auto pmf = qstat::pmf_vector(kind, total, p1);
            const auto hist = kind == qstat::Statistics::MB ? qstat::sample_mb_process(total, p1, draws, seed)
                                                            : qstat::sample_pmf(pmf, draws, seed);
            const auto freq = hist.frequencies();
            std::string out = "n,count,frequency,pmf\n";
            for (size_t n = 0; n < hist.counts.size(); ++n)
                out += fmt::format("{},{},{:.17g},{:.17g}\n", n, hist.counts[n], freq[n], pmf[n]);
            write_output(output, out);
            std::cerr << fmt::format("total variation vs {} pmf: {:.6f}\n", qstat::to_string(kind),
                                     qstat::total_variation(hist, pmf));
            return 0;
        }

        if (plot_cmd->parsed()) {
            const auto records = load_input(input, input_format);
            auto it = std::find_if(records.begin(), records.end(),
                                   [&](const qstat::Record& r) { return r.spec.id == plot_id; });
            if (it == records.end())
                throw qstat::DataError(fmt::format("no record with id {}", plot_id));
            write_output(output, qstat::emit_plotdata(qstat::analyze_record(*it, thresholds, analysis_options())));
            return 0;
        }

        if (synth_cmd->parsed()) {
            const auto concepts = concepts_path.empty() ? qstat::psychological_concepts()
                                                        : qstat::parse_concepts_csv(qstat::read_file(concepts_path));
            const auto specs = qstat::parse_synthetic_params_csv(qstat::read_file(params_path), concepts);
            const auto records = qstat::generate_synthetic(specs, draws, scale, seed);
            write_output(output, synth_format == "json" ? qstat::write_dataset_json(records)
                                                        : qstat::write_dataset_csv(records));
            return 0;
        }

        if (web_cmd->parsed() || webfix_cmd->parsed()) {
            const auto pairs = pairs_path.empty() ? qstat::web::standard_pairs()
                                                  : qstat::web::parse_pairs_csv(qstat::read_file(pairs_path));
            const auto numbers = qstat::web::NumberLexicon::standard();
            if (k_max >= 0)
                query.k_max = k_max;

            if (webfix_cmd->parsed()) {
                const auto scenario = qstat::web::parse_fixture_scenario_csv(qstat::read_file(scenario_path));
                const auto hits = qstat::web::synthesize_fixture(pairs, scenario, query, numbers, seed);
                write_output(output, nlohmann::json(hits).dump(1) + "\n");
                return 0;
            }

            std::unique_ptr<qstat::web::SearchClient> client;
            if (mode == "fixture") {
                if (fixture_path.empty())
                    throw UsageError("--mode fixture requires --fixture");
                client = std::make_unique<qstat::web::FixtureClient>(qstat::web::FixtureClient::from_file(fixture_path));
            } else {
                client = std::make_unique<qstat::web::HttpSearchClient>(qstat::web::HttpSearchClient::from_environment());
            }
            std::unique_ptr<qstat::web::CountCache> cache;
            if (!cache_path.empty())
                cache = std::make_unique<qstat::web::CountCache>(cache_path);
            qstat::web::RateLimiter limiter(mode == "live" ? rate : 0.0);

            const auto cells = qstat::web::build_web_dataset(pairs, query, numbers, *client, cache.get(), limiter);
            size_t warnings = 0;
            for (const auto& cell : cells) {
                warnings += cell.warnings.size();
                if (!cell.error.empty())
                    std::cerr << fmt::format("pair {} N={}: {}\n", cell.pair_id, cell.total, cell.error);
            }
            if (warnings > 0)
                std::cerr << fmt::format("{} lookup warning(s)\n", warnings);
            const auto rows = qstat::web::analyze_web(cells, thresholds);
            write_output(output, qstat::web::emit_web_report(rows, pairs));
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const qstat::SearchError& e) {
        std::cerr << "search error: " << e.what() << "\n";
        return kDataError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    }
    return 0;
}
