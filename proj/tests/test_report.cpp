#include "qstat/errors.hpp"
#include "qstat/montecarlo.hpp"
#include "qstat/report.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace qstat;

namespace {

Record make_record(int id, std::vector<double> counts, std::string concept_name = "Animals")
{
    const int total = static_cast<int>(counts.size()) - 1;
    return Record{ConceptSpec{id, total, std::move(concept_name), "Cat", "Dog"}, CountVector::dense(counts)};
}

Record binomial_record(int id)
{
    auto v = pmf_vector(Statistics::MB, 9, 0.57);
    for (double& x : v)
        x = std::round(x * 352.0);
    return make_record(id, v, "Fruit");
}

std::vector<std::string> lines_of(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        out.push_back(line);
    return out;
}

} // namespace

TEST_SUITE("report") {

TEST_CASE("binomial data favours MB")
{
    const auto row = analyze_record(binomial_record(2));
    CHECK(row.comparison.winner == Winner::MB);
    CHECK(row.comparison.delta_bic < 0.0);
    CHECK(row.fit_mb.params.p1() == doctest::Approx(0.57).epsilon(0.005));
}

TEST_CASE("uniform data favours BE")
{
    const auto row = analyze_record(make_record(1, std::vector<double>(12, 10.0)));
    CHECK(row.comparison.winner == Winner::BE);
    CHECK(row.fit_be.params.p1() == doctest::Approx(0.5));
    REQUIRE(row.comparison.r_squared_winner);
    CHECK(*row.comparison.r_squared_winner == 1.0);
    CHECK(row.comparison.strength == Strength::Strong);
}

TEST_CASE("batch analysis")
{
    CHECK_THROWS_AS(analyze({}), EmptyDataError);

    const std::vector<Record> records{binomial_record(1), make_record(2, std::vector<double>(12, 3.0)),
                                      make_record(3, {5, 0, 0, 0})};
    AnalysisOptions options;
    options.mask = std::pair{1, 3};
    const auto batch = analyze(records, {}, options);
    // Record 3 has nothing inside the mask.
    REQUIRE(batch.rows.size() == 2);
    REQUIRE(batch.failures.size() == 1);
    CHECK(batch.failures[0].id == 3);
    CHECK(batch.rows[0].spec.id == 1);
    CHECK(batch.rows[0].fit_mb.n_points == 3);
    CHECK(batch.rows[1].data.included_indices() == std::vector<int>{1, 2, 3});
}

TEST_CASE("format_fixed2")
{
    CHECK(format_fixed2(19.314) == "19.31");
    CHECK(format_fixed2(-9.536) == "-9.54");
    CHECK(format_fixed2(-0.001) == "0.00");
    CHECK(format_fixed2(0.0) == "0.00");
    CHECK(format_fixed2(1.0) == "1.00");
}

TEST_CASE("tsv report")
{
    const std::vector<Record> records{make_record(1, std::vector<double>(12, 10.0)), binomial_record(2)};
    const auto batch = analyze(records);
    const auto tsv = emit_report(batch.rows, ReportFormat::Tsv);
    const auto lines = lines_of(tsv);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "id\tP_MB\tR2_MB\tP_BE\tR2_BE\tdelta_BIC\tverdict");
    CHECK(lines[1].rfind("1\t0.50\tNA\t0.50\t1.00\t", 0) == 0);
    CHECK(lines[1].ends_with("\tBE strong"));
    CHECK(lines[2].rfind("2\t0.57\t", 0) == 0);
    CHECK(lines[2].find("\tMB ") != std::string::npos);
    CHECK(emit_report(batch.rows, ReportFormat::Tsv) == tsv);
    CHECK_THROWS_AS(emit_report({}, ReportFormat::Tsv), EmptyDataError);
}

TEST_CASE("markdown report")
{
    const auto batch = analyze(std::vector<Record>{binomial_record(5)});
    const auto lines = lines_of(emit_report(batch.rows, ReportFormat::Markdown));
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "| id | P_MB | R2_MB | P_BE | R2_BE | delta_BIC | verdict |");
    CHECK(lines[1].rfind("|---", 0) == 0);
    CHECK(lines[2].rfind("| 5 | 0.57 |", 0) == 0);
}

TEST_CASE("json report round trip")
{
    const std::vector<Record> records{make_record(1, std::vector<double>(12, 10.0)), binomial_record(2),
                                      make_record(3, {4, 9, 3, 12, 20, 8, 5, 2, 1}, "Mood")};
    const auto rows = analyze(records).rows;
    const auto json_text = emit_report(rows, ReportFormat::Json);
    const auto back = parse_report_json(json_text);
    REQUIRE(back.size() == rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].spec == rows[i].spec);
        CHECK(back[i].data == rows[i].data);
        CHECK(std::abs(back[i].fit_mb.params.p1() - rows[i].fit_mb.params.p1()) <= 1e-9);
        CHECK(std::abs(back[i].fit_be.params.p1() - rows[i].fit_be.params.p1()) <= 1e-9);
        CHECK(std::abs(back[i].fit_mb.rss - rows[i].fit_mb.rss) <= 1e-9);
        CHECK(std::abs(back[i].comparison.delta_bic - rows[i].comparison.delta_bic) <= 1e-9);
        CHECK(back[i].comparison.winner == rows[i].comparison.winner);
        CHECK(back[i].comparison.strength == rows[i].comparison.strength);
        CHECK(back[i].fit_mb.r_squared.has_value() == rows[i].fit_mb.r_squared.has_value());
    }
    CHECK(emit_report(back, ReportFormat::Json) == json_text);
    CHECK_THROWS_AS(parse_report_json("[]"), DataError);
}

TEST_CASE("plotdata")
{
    const auto row = analyze_record(make_record(1, {4, 9, 3, 12, 20, 8, 5, 2, 1, 0, 3, 1}));
    const auto lines = lines_of(emit_plotdata(row));
    REQUIRE(lines.size() == 13);
    CHECK(lines[0] == "n,empirical_freq,mb_fit,be_fit");

    double mb_sum = 0.0;
    std::vector<double> be;
    for (size_t i = 1; i < lines.size(); ++i) {
        std::vector<std::string> cells;
        std::istringstream in(lines[i]);
        for (std::string cell; std::getline(in, cell, ',');)
            cells.push_back(cell);
        REQUIRE(cells.size() == 4);
        CHECK(std::stoi(cells[0]) == static_cast<int>(i - 1));
        mb_sum += std::stod(cells[2]);
        be.push_back(std::stod(cells[3]));
    }
    CHECK(std::abs(mb_sum - 1.0) < 1e-12);
    // BE is affine in n.
    for (size_t i = 2; i < be.size(); ++i)
        CHECK((be[i] - be[i - 1]) == doctest::Approx(be[1] - be[0]).epsilon(1e-9));

    AnalysisOptions options;
    options.mask = std::pair{2, 11};
    const auto masked = analyze_record(make_record(1, {4, 9, 3, 12, 20, 8, 5, 2, 1, 0, 3, 1}), {}, options);
    const auto masked_lines = lines_of(emit_plotdata(masked));
    REQUIRE(masked_lines.size() == 13);
    CHECK(masked_lines[1].rfind("0,,", 0) == 0);
    CHECK(masked_lines[2].rfind("1,,", 0) == 0);
    CHECK(masked_lines[3].rfind("2,0.", 0) == 0);
}

TEST_CASE("noiseless synthetic data is classified by its generating model")
{
    const auto concepts = psychological_concepts();
    Rng rng(31);
    std::vector<SyntheticSpec> specs;
    for (int trial = 0; trial < 60; ++trial) {
        auto spec = concepts[static_cast<size_t>(trial) % concepts.size()];
        spec.id = trial + 1;
        const auto kind = trial % 2 ? Statistics::MB : Statistics::BE;
        const double p = 0.05 + 0.9 * uniform01(rng);
        specs.push_back(SyntheticSpec{spec, kind, p});
    }
    const auto rows = analyze(generate_synthetic(specs, 0, 1000.0, 0)).rows;
    REQUIRE(rows.size() == specs.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        const Winner want = specs[i].kind == Statistics::MB ? Winner::MB : Winner::BE;
        CHECK(rows[i].comparison.winner == want);
    }
}

}
