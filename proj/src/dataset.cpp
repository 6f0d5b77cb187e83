#include "qstat/dataset.hpp"

#include "qstat/errors.hpp"
#include "qstat/montecarlo.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace qstat {

namespace {

using json = nlohmann::json;

constexpr std::string_view kFixedColumns[] = {"id", "N", "concept", "state1", "state2"};

std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    size_t start = 0;
    while (start < text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

std::string where(size_t line_no, std::string_view field)
{
    return fmt::format("line {}, field '{}'", line_no, field);
}

int parse_int(std::string_view text, size_t line_no, std::string_view field)
{
    int value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw DataError(fmt::format("{}: expected an integer, got '{}'", where(line_no, field), text));
    return value;
}

double parse_double(std::string_view text, size_t line_no, std::string_view field)
{
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw DataError(fmt::format("{}: expected a number, got '{}'", where(line_no, field), text));
    return value;
}

void check_header(const std::vector<std::string>& header, size_t fixed)
{
    if (header.size() < fixed)
        throw DataError(fmt::format("line 1: header needs at least {} columns", fixed));
    for (size_t i = 0; i < fixed; ++i)
        if (header[i] != kFixedColumns[i])
            throw DataError(fmt::format("line 1: column {} must be '{}', found '{}'", i + 1, kFixedColumns[i], header[i]));
    for (size_t i = fixed; i < header.size(); ++i)
        if (header[i] != fmt::format("c{}", i - fixed))
            throw DataError(fmt::format("line 1: column {} must be 'c{}', found '{}'", i + 1, i - fixed, header[i]));
}

ConceptSpec concept_from_fields(const std::vector<std::string>& fields, size_t line_no)
{
    ConceptSpec spec;
    spec.id = parse_int(fields[0], line_no, "id");
    spec.total = parse_int(fields[1], line_no, "N");
    spec.concept_name = fields[2];
    spec.state1_label = fields[3];
    spec.state2_label = fields[4];
    return spec;
}

// Collects per-record problems so one bad file reports every bad record.
class ErrorList {
public:
    void add(std::string message) { messages_.push_back(std::move(message)); }

    void throw_if_any() const
    {
        if (messages_.empty())
            return;
        std::string text = fmt::format("{} invalid record(s):", messages_.size());
        for (const auto& m : messages_)
            text += "\n  " + m;
        throw DataError(text);
    }

private:
    std::vector<std::string> messages_;
};

std::string format_count(double value)
{
    return fmt::format("{}", value);
}

} // namespace

void ConceptSpec::validate() const
{
    if (total < 1)
        throw DomainError(fmt::format("concept {}: N must be >= 1, got {}", id, total));
    if (state1_label.empty() || state2_label.empty())
        throw DomainError(fmt::format("concept {}: state labels must be non-empty", id));
    if (state1_label == state2_label)
        throw DomainError(fmt::format("concept {}: state labels must differ", id));
}

DataFormat parse_data_format(std::string_view text)
{
    if (text == "csv")
        return DataFormat::Csv;
    if (text == "json")
        return DataFormat::Json;
    throw DomainError(fmt::format("unknown data format '{}'", text));
}

DataFormat data_format_for(const std::filesystem::path& path)
{
    return path.extension() == ".json" ? DataFormat::Json : DataFormat::Csv;
}

std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (quoted)
        throw DataError("unterminated quoted field");
    fields.push_back(std::move(current));
    return fields;
}

std::string csv_escape(std::string_view field)
{
    if (field.find_first_of(",\"\n") == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError(fmt::format("cannot write '{}'", path.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::vector<Record> parse_dataset_csv(std::string_view text)
{
    const auto lines = split_lines(text);
    if (lines.empty())
        throw DataError("empty dataset");
    const auto header = split_csv_line(lines[0]);
    check_header(header, std::size(kFixedColumns));
    const size_t width = header.size();

    std::vector<Record> records;
    ErrorList errors;
    for (size_t i = 1; i < lines.size(); ++i) {
        const size_t line_no = i + 1;
        if (lines[i].empty())
            continue;
        std::vector<std::string> fields;
        try {
            fields = split_csv_line(lines[i]);
        } catch (const DataError& e) {
            errors.add(fmt::format("line {}: {}", line_no, e.what()));
            continue;
        }
        if (fields.size() < std::size(kFixedColumns)) {
            errors.add(fmt::format("line {}: expected at least {} fields, found {}", line_no,
                                   std::size(kFixedColumns), fields.size()));
            continue;
        }
        try {
            ConceptSpec spec = concept_from_fields(fields, line_no);
            spec.validate();
            const size_t expected = static_cast<size_t>(spec.total) + 1;
            size_t present = fields.size() - std::size(kFixedColumns);
            // Trailing empty cells pad short rows out to the header width.
            while (present > expected && fields[std::size(kFixedColumns) + present - 1].empty())
                --present;
            if (present != expected || fields.size() > width)
                throw DataError(fmt::format("record {} (line {}): N={} needs {} count columns, found {}", spec.id,
                                            line_no, spec.total, expected, present));
            std::map<int, double> counts;
            for (size_t n = 0; n < expected; ++n) {
                const std::string& cell = fields[std::size(kFixedColumns) + n];
                if (cell.empty())
                    continue;
                counts.emplace(static_cast<int>(n), parse_double(cell, line_no, fmt::format("c{}", n)));
            }
            records.push_back(Record{std::move(spec), CountVector(expected - 1, std::move(counts))});
        } catch (const DataError& e) {
            errors.add(e.what());
        } catch (const std::exception& e) {
            errors.add(fmt::format("line {}: {}", line_no, e.what()));
        }
    }
    errors.throw_if_any();
    return records;
}

std::vector<Record> parse_dataset_json(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(fmt::format("JSON parse error: {}", e.what()));
    }
    if (!doc.is_object() || !doc.contains("records") || !doc["records"].is_array())
        throw DataError("JSON dataset must be an object with a 'records' array");

    std::vector<Record> records;
    ErrorList errors;
    size_t index = 0;
    for (const auto& item : doc["records"]) {
        try {
            ConceptSpec spec;
            spec.id = item.at("id").get<int>();
            spec.total = item.at("N").get<int>();
            spec.concept_name = item.at("concept").get<std::string>();
            spec.state1_label = item.at("state1").get<std::string>();
            spec.state2_label = item.at("state2").get<std::string>();
            spec.validate();
            const auto& cells = item.at("counts");
            if (!cells.is_array() || cells.size() != static_cast<size_t>(spec.total) + 1)
                throw DataError(fmt::format("record {}: N={} needs {} counts, found {}", spec.id, spec.total,
                                            spec.total + 1, cells.is_array() ? cells.size() : 0));
            std::map<int, double> counts;
            for (size_t n = 0; n < cells.size(); ++n)
                if (!cells[n].is_null())
                    counts.emplace(static_cast<int>(n), cells[n].get<double>());
            records.push_back(Record{std::move(spec), CountVector(static_cast<int>(cells.size()) - 1, std::move(counts))});
        } catch (const DataError& e) {
            errors.add(e.what());
        } catch (const std::exception& e) {
            errors.add(fmt::format("records[{}]: {}", index, e.what()));
        }
        ++index;
    }
    errors.throw_if_any();
    return records;
}

std::vector<Record> load_dataset(const std::filesystem::path& path, DataFormat format)
{
    const std::string text = read_file(path);
    return format == DataFormat::Json ? parse_dataset_json(text) : parse_dataset_csv(text);
}

std::vector<Record> load_dataset(const std::filesystem::path& path)
{
    return load_dataset(path, data_format_for(path));
}

std::string write_dataset_csv(std::span<const Record> records)
{
    int widest = 0;
    for (const auto& r : records)
        widest = std::max(widest, r.data.total_entities());

    std::string out = "id,N,concept,state1,state2";
    for (int n = 0; n <= widest; ++n)
        out += fmt::format(",c{}", n);
    out += '\n';
    for (const auto& r : records) {
        out += fmt::format("{},{},{},{},{}", r.spec.id, r.spec.total, csv_escape(r.spec.concept_name),
                           csv_escape(r.spec.state1_label), csv_escape(r.spec.state2_label));
        const auto& counts = r.data.counts();
        for (int n = 0; n <= r.data.total_entities(); ++n) {
            out += ',';
            if (auto it = counts.find(n); it != counts.end())
                out += format_count(it->second);
        }
        out += '\n';
    }
    return out;
}

std::string write_dataset_json(std::span<const Record> records)
{
    json doc = {{"records", json::array()}};
    for (const auto& r : records) {
        json cells = json::array();
        for (int n = 0; n <= r.data.total_entities(); ++n) {
            auto it = r.data.counts().find(n);
            cells.push_back(it == r.data.counts().end() ? json(nullptr) : json(it->second));
        }
        doc["records"].push_back({{"id", r.spec.id},
                                  {"N", r.spec.total},
                                  {"concept", r.spec.concept_name},
                                  {"state1", r.spec.state1_label},
                                  {"state2", r.spec.state2_label},
                                  {"counts", cells}});
    }
    return doc.dump(2) + "\n";
}

std::vector<ConceptSpec> parse_concepts_csv(std::string_view text)
{
    const auto lines = split_lines(text);
    if (lines.empty())
        throw DataError("empty concept list");
    const auto header = split_csv_line(lines[0]);
    if (header.size() != std::size(kFixedColumns))
        throw DataError("line 1: concept list header must be id,N,concept,state1,state2");
    check_header(header, std::size(kFixedColumns));

    std::vector<ConceptSpec> out;
    ErrorList errors;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty())
            continue;
        try {
            const auto fields = split_csv_line(lines[i]);
            if (fields.size() != std::size(kFixedColumns))
                throw DataError(fmt::format("line {}: expected 5 fields, found {}", i + 1, fields.size()));
            ConceptSpec spec = concept_from_fields(fields, i + 1);
            spec.validate();
            out.push_back(std::move(spec));
        } catch (const std::exception& e) {
            errors.add(e.what());
        }
    }
    errors.throw_if_any();
    return out;
}

std::vector<ConceptSpec> psychological_concepts()
{
    return {
        {1, 11, "Animals", "Cat", "Dog"},
        {2, 9, "Humans", "Man", "Woman"},
        {3, 8, "Expressions of Emotion", "Laugh", "Cry"},
        {4, 7, "Expressions of Affection", "Kiss", "Hug"},
        {5, 11, "Moods", "Happy", "Sad"},
        {6, 8, "Parts of Face", "Nose", "Chin"},
        {7, 9, "Movements", "Step", "Run"},
        {8, 11, "Animals", "Whale", "Condor"},
        {9, 9, "Humans", "Child", "Elder"},
        {10, 8, "Expressions of Emotion", "Sigh", "Moan"},
        {11, 7, "Expressions of Affection", "Caress", "Present"},
        {12, 11, "Moods", "Thoughtful", "Bored"},
        {13, 8, "Parts of Face", "Eye", "Cheek"},
        {14, 9, "Movements", "Jump", "Crawl"},
    };
}

std::vector<SyntheticSpec> parse_synthetic_params_csv(std::string_view text, std::span<const ConceptSpec> concepts)
{
    const auto lines = split_lines(text);
    if (lines.empty() || split_csv_line(lines[0]) != std::vector<std::string>{"id", "kind", "p1"})
        throw DataError("line 1: parameter table header must be id,kind,p1");

    std::vector<SyntheticSpec> out;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty())
            continue;
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != 3)
            throw DataError(fmt::format("line {}: expected 3 fields, found {}", i + 1, fields.size()));
        const int id = parse_int(fields[0], i + 1, "id");
        auto it = std::find_if(concepts.begin(), concepts.end(), [&](const ConceptSpec& c) { return c.id == id; });
        if (it == concepts.end())
            throw DataError(fmt::format("line {}: no concept with id {}", i + 1, id));
        SyntheticSpec spec{*it, Statistics::MB, 0.0};
        try {
            spec.kind = parse_statistics(fields[1]);
            spec.p1 = ModelParams(spec.kind, parse_double(fields[2], i + 1, "p1")).p1();
        } catch (const DomainError& e) {
            throw DataError(fmt::format("line {}: {}", i + 1, e.what()));
        }
        out.push_back(std::move(spec));
    }
    return out;
}

std::vector<Record> generate_synthetic(std::span<const SyntheticSpec> specs, std::uint64_t draws, double scale,
                                       std::uint64_t seed)
{
    std::vector<Record> out;
    out.reserve(specs.size());
    for (const auto& spec : specs) {
        spec.spec.validate();
        const auto probabilities = pmf_vector(spec.kind, spec.spec.total, spec.p1);
        std::vector<double> counts;
        if (draws == 0) {
            for (double p : probabilities)
                counts.push_back(p * scale);
        } else {
            counts = sample_pmf(probabilities, draws, seed + static_cast<std::uint64_t>(spec.spec.id)).counts_as_double();
        }
        out.push_back(Record{spec.spec, CountVector::dense(counts)});
    }
    return out;
}

} // namespace qstat
