#pragma once

// Web hit-count pipeline: phrase variants for every occupancy state of a
// state pair, exact-phrase hit counts from a search backend, aggregation into
// CountVectors, and the N-by-pair summary table.

#include "qstat/report.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qstat::web {

struct StateLexeme {
    std::string singular;
    std::string plural;

    const std::string& form_for(int count) const { return count == 1 ? singular : plural; }
};

/// Textual references for each number ("3", "three", ...).
class NumberLexicon {
public:
    NumberLexicon() = default;
    explicit NumberLexicon(std::map<int, std::vector<std::string>> references);

    /// Digits and words for 0..16, including "no", "a" and "a couple of".
    static NumberLexicon standard();

    /// Throws LexiconGapError when `number` has no reference.
    const std::vector<std::string>& references(int number) const;
    bool covers(int lo, int hi) const;

private:
    std::map<int, std::vector<std::string>> refs_;
};

struct SentenceSet {
    OccupancyConfig state;
    std::vector<std::string> sentences;
};

/// "u F1 and v F2" and "v F2 and u F1" for every reference u of k and v of
/// N-k, lowercased, first occurrence kept on duplicates.
SentenceSet generate_sentences(int k, int total, const StateLexeme& first, const StateLexeme& second,
                               const NumberLexicon& numbers);

enum class CountSource { Live, Fixture };

std::string_view to_string(CountSource source);

struct Lookup {
    bool found = false;
    std::uint64_t hits = 0;
};

/// A search backend answering exact-phrase hit counts. Transport and
/// authentication problems are reported by throwing SearchError.
class SearchClient {
public:
    virtual ~SearchClient() = default;
    virtual Lookup lookup(std::string_view phrase) = 0;
    virtual CountSource source() const = 0;
};

/// Hits from a JSON object mapping phrase to integer count.
class FixtureClient : public SearchClient {
public:
    explicit FixtureClient(std::unordered_map<std::string, std::uint64_t> hits);
    static FixtureClient from_json(std::string_view text);
    static FixtureClient from_file(const std::filesystem::path& path);

    Lookup lookup(std::string_view phrase) override;
    CountSource source() const override { return CountSource::Fixture; }

private:
    std::unordered_map<std::string, std::uint64_t> hits_;
};

/// HTTP JSON search API. Sends GET <endpoint>?q="<phrase>" with the key in
/// an Ocp-Apim-Subscription-Key header and reads webPages.totalEstimatedMatches
/// (or a top-level totalEstimatedMatches / hits field).
class HttpSearchClient : public SearchClient {
public:
    HttpSearchClient(std::string endpoint, std::string api_key,
                     std::chrono::seconds timeout = std::chrono::seconds(20));
    /// Reads SEARCH_API_ENDPOINT and SEARCH_API_KEY; throws SearchError if unset.
    static HttpSearchClient from_environment();

    Lookup lookup(std::string_view phrase) override;
    CountSource source() const override { return CountSource::Live; }

private:
    std::string origin_;
    std::string path_;
    std::string api_key_;
    std::chrono::seconds timeout_;
};

/// Parses a search response body into a hit count.
std::uint64_t parse_hit_count(std::string_view body);

struct CountCacheEntry {
    std::string sentence;
    std::uint64_t hits = 0;
    std::string retrieved_at; // ISO 8601, UTC
    CountSource source = CountSource::Fixture;
};

/// Sentence -> hits store, optionally persisted as JSON lines (one entry per
/// line, later lines win). Safe for concurrent use.
class CountCache {
public:
    CountCache() = default;
    explicit CountCache(std::filesystem::path file);

    std::optional<CountCacheEntry> get(std::string_view sentence, CountSource source) const;
    void put(CountCacheEntry entry);
    size_t size() const;

private:
    mutable std::mutex mutex_;
    std::unordered_map<std::string, CountCacheEntry> entries_;
    std::optional<std::filesystem::path> file_;
    std::ofstream out_;
};

std::string utc_timestamp();

/// Wall clock and sleeping, replaceable in tests.
class TimeSource {
public:
    using Clock = std::chrono::steady_clock;
    virtual ~TimeSource() = default;
    virtual Clock::time_point now() = 0;
    virtual void sleep_for(Clock::duration d) = 0;
};

TimeSource& system_time();

/// Spaces successive requests at least 1/rate seconds apart. rate <= 0 means
/// unlimited. Shared across all callers of one pipeline run.
class RateLimiter {
public:
    explicit RateLimiter(double requests_per_second, TimeSource& time = system_time());

    void acquire();
    TimeSource& time() { return time_; }

private:
    std::mutex mutex_;
    TimeSource& time_;
    std::optional<TimeSource::Clock::duration> interval_;
    std::optional<TimeSource::Clock::time_point> last_;
};

struct RetryPolicy {
    int attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
};

struct SentenceFailure {
    std::string sentence;
    std::string message;
};

struct FetchOutcome {
    std::uint64_t total_hits = 0;
    bool incomplete = false;
    std::vector<std::string> warnings;
    std::vector<SentenceFailure> failures;
    size_t client_requests = 0;
};

/// Sum of per-sentence hits. Cached sentences are not requested again; fresh
/// results are cached. A fixture miss contributes 0 with a warning; a sentence
/// still failing after the retry budget contributes 0 and marks the outcome
/// incomplete.
FetchOutcome fetch_counts(const SentenceSet& sentences, SearchClient& client, CountCache* cache,
                          RateLimiter& limiter, const RetryPolicy& retry = {});

struct WebPair {
    int id = 0;
    StateLexeme first;
    StateLexeme second;
};

/// CSV `j,singular1,plural1,singular2,plural2`.
std::vector<WebPair> parse_pairs_csv(std::string_view text);
/// cat/dog, man/woman, win/loss, son/daughter.
std::vector<WebPair> standard_pairs();

struct WebQuery {
    int n_min = 3;
    int n_max = 15;
    int k_min = 3;
    /// Defaults to N for each cell.
    std::optional<int> k_max;
};

/// One (pair, N) cell. `record` is empty when no usable CountVector could be
/// formed (too few indices or no hits at all); `error` then says why.
struct WebCell {
    int pair_id = 0;
    int total = 0;
    std::optional<Record> record;
    bool incomplete = false;
    std::vector<std::string> warnings;
    std::string error;
};

std::vector<WebCell> build_web_dataset(std::span<const WebPair> pairs, const WebQuery& query,
                                       const NumberLexicon& numbers, SearchClient& client, CountCache* cache,
                                       RateLimiter& limiter, const RetryPolicy& retry = {});

struct WebRow {
    int pair_id = 0;
    int total = 0;
    std::optional<AnalysisRow> analysis;
    bool incomplete = false;
    std::string error;
};

std::vector<WebRow> analyze_web(std::span<const WebCell> cells, const Thresholds& thresholds = {},
                                const AnalysisOptions& options = {});

enum class Trend { MBOnly, BEOnly, Mixed, Inconclusive };

std::string_view to_string(Trend trend);

/// Best-fit R² below this marks a cell as not significant.
inline constexpr double kSignificantR2 = 0.65;

bool is_significant(const WebRow& row);

/// Trend over one pair's rows across N. Requires rows for at least two N.
Trend classify_trends(std::span<const WebRow> rows_for_pair);

/// TSV grid: one line per N with "delta,R2" per pair ("-" for R² below the
/// significance cut, "NA" for failed cells, "*" suffix on incomplete cells),
/// closed by a "Type" line of trend labels.
std::string emit_web_report(std::span<const WebRow> rows, std::span<const WebPair> pairs);

/// Generating model for one (pair, N) cell of a synthetic fixture.
struct FixtureScenarioCell {
    int pair_id = 0;
    int total = 0;
    Statistics kind = Statistics::MB;
    double p1 = 0.5;
    double total_hits = 0.0;
    /// Standard deviation of the multiplicative log-normal noise per state.
    double noise = 0.0;
};

/// CSV `j,N,kind,p1,total_hits,noise`.
std::vector<FixtureScenarioCell> parse_fixture_scenario_csv(std::string_view text);

/// Phrase -> hits map realising the scenario. Each state's hits follow the
/// cell's pmf with noise and are split unevenly across its phrases.
std::map<std::string, std::uint64_t> synthesize_fixture(std::span<const WebPair> pairs,
                                                        std::span<const FixtureScenarioCell> scenario,
                                                        const WebQuery& query, const NumberLexicon& numbers,
                                                        std::uint64_t seed);

} // namespace qstat::web
