#pragma once

// Experiment records: a concept with its two states plus the observed counts.
//
// CSV layout (UTF-8, comma separated, '.' decimals, LF line ends):
//
//   id,N,concept,state1,state2,c0,c1,...,cK
//   1,11,Animals,Cat,Dog,3,5,...
//
// K is the largest N in the file. A row for N carries exactly N+1 count
// fields; rows with a smaller N may pad with trailing empty fields up to the
// header width. An empty count field inside 0..N excludes that index from
// the fit (a masked cell).
//
// JSON mirrors the CSV:
//
//   {"records": [{"id": 1, "N": 11, "concept": "Animals", "state1": "Cat",
//                 "state2": "Dog", "counts": [3, 5, null, ...]}]}

#include "qstat/estimation.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qstat {

struct ConceptSpec {
    int id = 0;
    int total = 0;
    std::string concept_name;
    std::string state1_label;
    std::string state2_label;

    /// Throws DomainError on N < 1 or empty / identical labels.
    void validate() const;

    friend bool operator==(const ConceptSpec&, const ConceptSpec&) = default;
};

struct Record {
    ConceptSpec spec;
    CountVector data;

    friend bool operator==(const Record&, const Record&) = default;
};

enum class DataFormat { Csv, Json };

DataFormat parse_data_format(std::string_view text);
/// .json selects JSON, anything else CSV.
DataFormat data_format_for(const std::filesystem::path& path);

std::vector<Record> parse_dataset_csv(std::string_view text);
std::vector<Record> parse_dataset_json(std::string_view text);
std::vector<Record> load_dataset(const std::filesystem::path& path, DataFormat format);
std::vector<Record> load_dataset(const std::filesystem::path& path);

std::string write_dataset_csv(std::span<const Record> records);
std::string write_dataset_json(std::span<const Record> records);

/// Concept list without counts: `id,N,concept,state1,state2`.
std::vector<ConceptSpec> parse_concepts_csv(std::string_view text);
/// The fourteen concepts of the psychological experiment.
std::vector<ConceptSpec> psychological_concepts();

struct SyntheticSpec {
    ConceptSpec spec;
    Statistics kind = Statistics::MB;
    double p1 = 0.5;
};

/// Parameter table `id,kind,p1` joined onto concepts by id.
std::vector<SyntheticSpec> parse_synthetic_params_csv(std::string_view text, std::span<const ConceptSpec> concepts);

/// Records drawn from each spec's model. draws == 0 gives the noiseless
/// pmf scaled by `scale`; otherwise `draws` multinomial samples per record
/// from a generator seeded with seed + id.
std::vector<Record> generate_synthetic(std::span<const SyntheticSpec> specs, std::uint64_t draws, double scale,
                                       std::uint64_t seed);

// Shared CSV helpers.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

} // namespace qstat
