#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "qstat/webcount.hpp"

#include "qstat/errors.hpp"
#include "qstat/montecarlo.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <numbers>
#include <set>
#include <thread>

namespace qstat::web {

namespace {

using json = nlohmann::json;

std::string lowercase(std::string text)
{
    std::transform(text.begin(), text.end(), text.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return text;
}

std::vector<std::string_view> lines_of(std::string_view text)
{
    std::vector<std::string_view> out;
    size_t start = 0;
    while (start < text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (!line.empty())
            out.push_back(line);
        start = end + 1;
    }
    return out;
}

class SystemTime : public TimeSource {
public:
    Clock::time_point now() override { return Clock::now(); }
    void sleep_for(Clock::duration d) override { std::this_thread::sleep_for(d); }
};

double standard_normal(Rng& rng)
{
    // Box-Muller on the portable uniform stream.
    const double u1 = 1.0 - uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int cell_k_min(const WebQuery& q) { return std::max(q.k_min, 0); }
int cell_k_max(const WebQuery& q, int total) { return std::min(q.k_max.value_or(total), total); }

} // namespace

NumberLexicon::NumberLexicon(std::map<int, std::vector<std::string>> references) : refs_(std::move(references))
{
    for (const auto& [number, words] : refs_) {
        if (words.empty())
            throw LexiconGapError(fmt::format("number {} has an empty reference list", number));
        for (const auto& w : words)
            if (w.empty())
                throw DomainError(fmt::format("number {} has an empty reference", number));
    }
}

NumberLexicon NumberLexicon::standard()
{
    static const char* const words[] = {"zero",   "one",     "two",      "three",    "four",    "five",
                                        "six",    "seven",   "eight",    "nine",     "ten",     "eleven",
                                        "twelve", "thirteen", "fourteen", "fifteen", "sixteen"};
    std::map<int, std::vector<std::string>> refs;
    refs[0] = {"0", "no", "zero"};
    refs[1] = {"1", "a", "one"};
    refs[2] = {"2", "two", "a couple of"};
    for (int n = 3; n <= 16; ++n)
        refs[n] = {std::to_string(n), words[n]};
    return NumberLexicon(std::move(refs));
}

const std::vector<std::string>& NumberLexicon::references(int number) const
{
    auto it = refs_.find(number);
    if (it == refs_.end())
        throw LexiconGapError(fmt::format("no textual reference for the number {}", number));
    return it->second;
}

bool NumberLexicon::covers(int lo, int hi) const
{
    for (int n = lo; n <= hi; ++n)
        if (!refs_.contains(n))
            return false;
    return true;
}

SentenceSet generate_sentences(int k, int total, const StateLexeme& first, const StateLexeme& second,
                               const NumberLexicon& numbers)
{
    if (first.singular.empty() || first.plural.empty() || second.singular.empty() || second.plural.empty())
        throw DomainError("state lexemes need non-empty singular and plural forms");
    SentenceSet out{OccupancyConfig(k, total), {}};
    const int rest = total - k;
    const auto& first_refs = numbers.references(k);
    const auto& second_refs = numbers.references(rest);

    std::set<std::string> seen;
    auto emit = [&](std::string sentence) {
        sentence = lowercase(std::move(sentence));
        if (seen.insert(sentence).second)
            out.sentences.push_back(std::move(sentence));
    };
    for (const auto& u : first_refs) {
        for (const auto& v : second_refs) {
            const std::string a = u + " " + first.form_for(k);
            const std::string b = v + " " + second.form_for(rest);
            emit(a + " and " + b);
            emit(b + " and " + a);
        }
    }
    return out;
}

std::string_view to_string(CountSource source)
{
    return source == CountSource::Live ? "live" : "fixture";
}

FixtureClient::FixtureClient(std::unordered_map<std::string, std::uint64_t> hits) : hits_(std::move(hits)) {}

FixtureClient FixtureClient::from_json(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(fmt::format("fixture: {}", e.what()));
    }
    if (!doc.is_object())
        throw DataError("fixture must be a JSON object of phrase -> hits");
    std::unordered_map<std::string, std::uint64_t> hits;
    for (const auto& [phrase, value] : doc.items()) {
        if (!value.is_number_unsigned())
            throw DataError(fmt::format("fixture: hits for '{}' must be a non-negative integer", phrase));
        hits.emplace(phrase, value.get<std::uint64_t>());
    }
    return FixtureClient(std::move(hits));
}

FixtureClient FixtureClient::from_file(const std::filesystem::path& path)
{
    return from_json(read_file(path));
}

Lookup FixtureClient::lookup(std::string_view phrase)
{
    auto it = hits_.find(std::string(phrase));
    if (it == hits_.end())
        return {};
    return {true, it->second};
}

HttpSearchClient::HttpSearchClient(std::string endpoint, std::string api_key, std::chrono::seconds timeout)
    : api_key_(std::move(api_key)), timeout_(timeout)
{
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw SearchError(fmt::format("search endpoint '{}' lacks a scheme", endpoint));
    const auto path_start = endpoint.find('/', scheme_end + 3);
    origin_ = endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : endpoint.substr(path_start);
}

HttpSearchClient HttpSearchClient::from_environment()
{
    const char* endpoint = std::getenv("SEARCH_API_ENDPOINT");
    const char* key = std::getenv("SEARCH_API_KEY");
    if (endpoint == nullptr || *endpoint == '\0')
        throw SearchError("SEARCH_API_ENDPOINT is not set");
    if (key == nullptr || *key == '\0')
        throw SearchError("SEARCH_API_KEY is not set");
    return HttpSearchClient(endpoint, key);
}

std::uint64_t parse_hit_count(std::string_view body)
{
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        throw SearchError(fmt::format("unparseable search response: {}", e.what()));
    }
    auto read = [](const json& v) -> std::uint64_t {
        if (!v.is_number() || v.get<double>() < 0)
            throw SearchError("search response hit count is not a non-negative number");
        return v.get<std::uint64_t>();
    };
    if (doc.contains("webPages") && doc["webPages"].contains("totalEstimatedMatches"))
        return read(doc["webPages"]["totalEstimatedMatches"]);
    if (doc.contains("totalEstimatedMatches"))
        return read(doc["totalEstimatedMatches"]);
    if (doc.contains("hits"))
        return read(doc["hits"]);
    // A well-formed answer without a result block means nothing matched.
    return 0;
}

Lookup HttpSearchClient::lookup(std::string_view phrase)
{
    httplib::Client client(origin_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    const httplib::Params params{{"q", "\"" + std::string(phrase) + "\""}};
    const httplib::Headers headers{{"Ocp-Apim-Subscription-Key", api_key_}};
    auto response = client.Get(path_, params, headers);
    if (!response)
        throw SearchError(fmt::format("request failed: {}", httplib::to_string(response.error())));
    if (response->status == 401 || response->status == 403)
        throw SearchError(fmt::format("authentication rejected (HTTP {})", response->status));
    if (response->status != 200)
        throw SearchError(fmt::format("HTTP {}", response->status));
    return {true, parse_hit_count(response->body)};
}

CountCache::CountCache(std::filesystem::path file) : file_(std::move(file))
{
    if (std::filesystem::exists(*file_)) {
        const std::string text = read_file(*file_);
        size_t line_no = 0;
        for (auto line : lines_of(text)) {
            ++line_no;
            try {
                const json j = json::parse(line);
                CountCacheEntry entry{j.at("sentence").get<std::string>(), j.at("hits").get<std::uint64_t>(),
                                      j.at("retrieved_at").get<std::string>(),
                                      j.at("source").get<std::string>() == "live" ? CountSource::Live
                                                                                  : CountSource::Fixture};
                entries_.insert_or_assign(entry.sentence, std::move(entry));
            } catch (const json::exception& e) {
                throw DataError(fmt::format("{}:{}: bad cache entry: {}", file_->string(), line_no, e.what()));
            }
        }
    }
    out_.open(*file_, std::ios::app | std::ios::binary);
    if (!out_)
        throw DataError(fmt::format("cannot open cache '{}' for appending", file_->string()));
}

std::optional<CountCacheEntry> CountCache::get(std::string_view sentence, CountSource source) const
{
    std::lock_guard lock(mutex_);
    auto it = entries_.find(std::string(sentence));
    if (it == entries_.end() || it->second.source != source)
        return std::nullopt;
    return it->second;
}

void CountCache::put(CountCacheEntry entry)
{
    std::lock_guard lock(mutex_);
    if (out_.is_open()) {
        const json j = {{"sentence", entry.sentence},
                        {"hits", entry.hits},
                        {"retrieved_at", entry.retrieved_at},
                        {"source", to_string(entry.source)}};
        out_ << j.dump() << '\n';
        out_.flush();
    }
    entries_.insert_or_assign(entry.sentence, std::move(entry));
}

size_t CountCache::size() const
{
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

TimeSource& system_time()
{
    static SystemTime instance;
    return instance;
}

RateLimiter::RateLimiter(double requests_per_second, TimeSource& time) : time_(time)
{
    if (requests_per_second > 0.0)
        interval_ = std::chrono::duration_cast<TimeSource::Clock::duration>(
            std::chrono::duration<double>(1.0 / requests_per_second));
}

void RateLimiter::acquire()
{
    std::lock_guard lock(mutex_);
    if (!interval_)
        return;
    if (last_) {
        const auto ready = *last_ + *interval_;
        const auto now = time_.now();
        if (now < ready)
            time_.sleep_for(ready - now);
    }
    last_ = time_.now();
}

FetchOutcome fetch_counts(const SentenceSet& sentences, SearchClient& client, CountCache* cache,
                          RateLimiter& limiter, const RetryPolicy& retry)
{
    FetchOutcome outcome;
    for (const auto& sentence : sentences.sentences) {
        if (cache != nullptr) {
            if (auto hit = cache->get(sentence, client.source())) {
                outcome.total_hits += hit->hits;
                continue;
            }
        }

        std::optional<Lookup> result;
        std::string last_error;
        auto backoff = retry.initial_backoff;
        for (int attempt = 1; attempt <= std::max(retry.attempts, 1); ++attempt) {
            limiter.acquire();
            ++outcome.client_requests;
            try {
                result = client.lookup(sentence);
                break;
            } catch (const SearchError& e) {
                last_error = e.what();
                if (attempt < retry.attempts) {
                    limiter.time().sleep_for(backoff);
                    backoff *= 2;
                }
            }
        }

        if (!result) {
            outcome.incomplete = true;
            outcome.failures.push_back({sentence, last_error});
            continue;
        }
        if (!result->found) {
            outcome.warnings.push_back(fmt::format("no fixture entry for \"{}\"; counted as 0", sentence));
            continue;
        }
        outcome.total_hits += result->hits;
        if (cache != nullptr)
            cache->put({sentence, result->hits, utc_timestamp(), client.source()});
    }
    return outcome;
}

std::vector<WebPair> parse_pairs_csv(std::string_view text)
{
    const auto lines = lines_of(text);
    const std::vector<std::string> header{"j", "singular1", "plural1", "singular2", "plural2"};
    if (lines.empty() || split_csv_line(lines[0]) != header)
        throw DataError("line 1: pairs header must be j,singular1,plural1,singular2,plural2");
    std::vector<WebPair> pairs;
    for (size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_csv_line(lines[i]);
        if (f.size() != header.size())
            throw DataError(fmt::format("line {}: expected 5 fields, found {}", i + 1, f.size()));
        WebPair pair;
        try {
            pair.id = std::stoi(f[0]);
        } catch (const std::exception&) {
            throw DataError(fmt::format("line {}, field 'j': expected an integer, got '{}'", i + 1, f[0]));
        }
        pair.first = {f[1], f[2]};
        pair.second = {f[3], f[4]};
        for (const auto& s : {f[1], f[2], f[3], f[4]})
            if (s.empty())
                throw DataError(fmt::format("line {}: empty state form", i + 1));
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

std::vector<WebPair> standard_pairs()
{
    return {{1, {"cat", "cats"}, {"dog", "dogs"}},
            {2, {"man", "men"}, {"woman", "women"}},
            {3, {"win", "wins"}, {"loss", "losses"}},
            {4, {"son", "sons"}, {"daughter", "daughters"}}};
}

std::vector<WebCell> build_web_dataset(std::span<const WebPair> pairs, const WebQuery& query,
                                       const NumberLexicon& numbers, SearchClient& client, CountCache* cache,
                                       RateLimiter& limiter, const RetryPolicy& retry)
{
    if (query.n_min < 1 || query.n_max < query.n_min)
        throw DomainError(fmt::format("invalid N range {}..{}", query.n_min, query.n_max));

    std::vector<WebCell> cells;
    for (const auto& pair : pairs) {
        for (int total = query.n_min; total <= query.n_max; ++total) {
            WebCell cell{pair.id, total, std::nullopt, false, {}, {}};
            const int lo = cell_k_min(query);
            const int hi = cell_k_max(query, total);
            std::map<int, double> counts;
            for (int k = lo; k <= hi; ++k) {
                const auto sentences = generate_sentences(k, total, pair.first, pair.second, numbers);
                auto outcome = fetch_counts(sentences, client, cache, limiter, retry);
                counts.emplace(k, static_cast<double>(outcome.total_hits));
                cell.incomplete = cell.incomplete || outcome.incomplete;
                for (auto& w : outcome.warnings)
                    cell.warnings.push_back(std::move(w));
                for (const auto& f : outcome.failures)
                    cell.warnings.push_back(fmt::format("lookup failed for \"{}\": {}", f.sentence, f.message));
            }
            try {
                ConceptSpec spec{pair.id * 100 + total, total, pair.first.singular + "/" + pair.second.singular,
                                 pair.first.plural, pair.second.plural};
                spec.validate();
                cell.record = Record{std::move(spec), CountVector(total, std::move(counts))};
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

std::vector<WebRow> analyze_web(std::span<const WebCell> cells, const Thresholds& thresholds,
                                const AnalysisOptions& options)
{
    std::vector<WebRow> rows;
    rows.reserve(cells.size());
    for (const auto& cell : cells) {
        WebRow row{cell.pair_id, cell.total, std::nullopt, cell.incomplete, cell.error};
        if (cell.record) {
            try {
                row.analysis = analyze_record(*cell.record, thresholds, options);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string_view to_string(Trend trend)
{
    switch (trend) {
    case Trend::MBOnly:
        return "MB only";
    case Trend::BEOnly:
        return "BE only";
    case Trend::Mixed:
        return "Mixed";
    case Trend::Inconclusive:
        return "Inconclusive";
    }
    return "Inconclusive";
}

bool is_significant(const WebRow& row)
{
    if (!row.analysis || row.analysis->comparison.winner == Winner::Tie)
        return false;
    const auto& r2 = row.analysis->comparison.r_squared_winner;
    return r2 && *r2 >= kSignificantR2;
}

Trend classify_trends(std::span<const WebRow> rows_for_pair)
{
    std::set<int> totals;
    for (const auto& row : rows_for_pair)
        totals.insert(row.total);
    if (totals.size() < 2)
        throw DomainError("classify_trends: need rows for at least two values of N");

    bool any_mb = false;
    bool any_be = false;
    for (const auto& row : rows_for_pair) {
        if (!is_significant(row))
            continue;
        if (row.analysis->comparison.winner == Winner::MB)
            any_mb = true;
        else
            any_be = true;
    }
    if (any_mb && any_be)
        return Trend::Mixed;
    if (any_mb)
        return Trend::MBOnly;
    if (any_be)
        return Trend::BEOnly;
    return Trend::Inconclusive;
}

std::string emit_web_report(std::span<const WebRow> rows, std::span<const WebPair> pairs)
{
    std::set<int> totals;
    for (const auto& row : rows)
        totals.insert(row.total);

    auto find = [&](int pair_id, int total) -> const WebRow* {
        for (const auto& row : rows)
            if (row.pair_id == pair_id && row.total == total)
                return &row;
        return nullptr;
    };

    std::string out = "N";
    for (const auto& pair : pairs)
        out += fmt::format("\tj={}", pair.id);
    out += '\n';
    for (int total : totals) {
        out += std::to_string(total);
        for (const auto& pair : pairs) {
            const WebRow* row = find(pair.id, total);
            std::string cell;
            if (row == nullptr || !row->analysis) {
                cell = "NA";
            } else {
                cell = format_fixed2(row->analysis->comparison.delta_bic) + "," +
                       (is_significant(*row) ? format_fixed2(*row->analysis->comparison.r_squared_winner) : "-");
            }
            if (row != nullptr && row->incomplete)
                cell += "*";
            out += "\t" + cell;
        }
        out += '\n';
    }
    out += "Type";
    for (const auto& pair : pairs) {
        std::vector<WebRow> own;
        for (const auto& row : rows)
            if (row.pair_id == pair.id)
                own.push_back(row);
        std::string label = "Inconclusive";
        try {
            label = std::string(to_string(classify_trends(own)));
        } catch (const DomainError&) {
        }
        out += "\t" + label;
    }
    out += '\n';
    return out;
}

std::vector<FixtureScenarioCell> parse_fixture_scenario_csv(std::string_view text)
{
    const auto lines = lines_of(text);
    const std::vector<std::string> header{"j", "N", "kind", "p1", "total_hits", "noise"};
    if (lines.empty() || split_csv_line(lines[0]) != header)
        throw DataError("line 1: scenario header must be j,N,kind,p1,total_hits,noise");
    std::vector<FixtureScenarioCell> out;
    for (size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_csv_line(lines[i]);
        if (f.size() != header.size())
            throw DataError(fmt::format("line {}: expected 6 fields, found {}", i + 1, f.size()));
        try {
            FixtureScenarioCell cell{std::stoi(f[0]), std::stoi(f[1]), parse_statistics(f[2]), std::stod(f[3]),
                                     std::stod(f[4]), std::stod(f[5])};
            ModelParams(cell.kind, cell.p1);
            out.push_back(cell);
        } catch (const std::exception& e) {
            throw DataError(fmt::format("line {}: {}", i + 1, e.what()));
        }
    }
    return out;
}

std::map<std::string, std::uint64_t> synthesize_fixture(std::span<const WebPair> pairs,
                                                        std::span<const FixtureScenarioCell> scenario,
                                                        const WebQuery& query, const NumberLexicon& numbers,
                                                        std::uint64_t seed)
{
    std::map<std::string, std::uint64_t> hits;
    Rng rng(seed);
    for (const auto& cell : scenario) {
        auto pair = std::find_if(pairs.begin(), pairs.end(), [&](const WebPair& p) { return p.id == cell.pair_id; });
        if (pair == pairs.end())
            throw DataError(fmt::format("scenario refers to unknown pair {}", cell.pair_id));
        const auto probabilities = pmf_vector(cell.kind, cell.total, cell.p1);
        for (int k = cell_k_min(query); k <= cell_k_max(query, cell.total); ++k) {
            const double expected =
                cell.total_hits * probabilities[static_cast<size_t>(k)] * std::exp(cell.noise * standard_normal(rng));
            const auto sentences = generate_sentences(k, cell.total, pair->first, pair->second, numbers);
            std::vector<double> weights;
            double weight_sum = 0.0;
            for (size_t s = 0; s < sentences.sentences.size(); ++s) {
                // Uneven split; earlier phrases get more weight.
                weights.push_back((0.2 + uniform01(rng)) / static_cast<double>(s + 1));
                weight_sum += weights.back();
            }
            for (size_t s = 0; s < sentences.sentences.size(); ++s) {
                const auto value = static_cast<std::uint64_t>(std::llround(expected * weights[s] / weight_sum));
                hits[sentences.sentences[s]] += value;
            }
        }
    }
    return hits;
}

} // namespace qstat::web
