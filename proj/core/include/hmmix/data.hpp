#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hmmix {

// Ingestion of aligned expression tables.
//
// Input rows are `probe_id,chromosome,position,<expr...>`, comma or tab
// delimited (autodetected from the header). Positions are one-based base-pair
// coordinates. Expression columns hold either L replicate values or a single
// precomputed median.

struct RawRecord {
  std::string probe_id;
  std::string chromosome;
  std::int64_t position = 0;
  std::vector<double> expressions;
};

struct RawDataset {
  std::vector<RawRecord> records;
  std::size_t replicate_count = 0;  // L, shared by every record
};

enum class ExpressionColumns {
  kReplicates,  // one column per array, reduced to medians
  kMedian,      // exactly one column, already the median
};

struct TableFormat {
  ExpressionColumns columns = ExpressionColumns::kReplicates;
  // 0 = autodetect from the header line (tab if present, else comma).
  char delimiter = 0;
};

RawDataset load_expression_table(const std::filesystem::path& path, const TableFormat& format = {});
RawDataset parse_expression_table(std::istream& in, const TableFormat& format = {});

struct DedupeResult {
  RawDataset dataset;
  std::size_t removed = 0;
};

// Drops every record whose probe id occurs more than once and every record
// whose (chromosome, position) is claimed more than once. Both conditions are
// evaluated on the input, so the operation is idempotent.
DedupeResult dedupe_alignments(const RawDataset& raw);

double median(std::span<const double> values);
std::vector<double> reduce_to_medians(const RawDataset& raw);

// Sentinel stored for the first location of a chromosome; never used because
// the dependence indicator is fixed at zero there.
inline constexpr double kFirstSiteDistance = 1.0;

// Largest consecutive gap over all position lists (gaps below one clamp to one).
std::int64_t max_gap(std::span<const std::vector<std::int64_t>> chromosomes);

// d_i = log(g_i) / log(g_max). Element 0 gets kFirstSiteDistance.
std::vector<double> rescale_distances(std::span<const std::int64_t> positions, std::int64_t g_max);

struct ChromosomeSeries {
  std::string chromosome;
  std::vector<std::int64_t> positions;
  std::vector<double> x;  // median expression per location
  std::vector<double> d;  // rescaled gap to the previous location
  std::vector<std::string> probe_ids;

  std::size_t size() const { return x.size(); }
};

enum class DistanceScale {
  kGlobal,         // one g_max over the whole dataset
  kPerChromosome,  // g_max recomputed inside each chromosome
};

struct Dataset {
  std::vector<ChromosomeSeries> series;

  std::size_t total_n() const;
  // offsets()[c] is the global index of the first location of series c;
  // the final element equals total_n().
  std::vector<std::size_t> offsets() const;
  // Concatenated x over all series.
  std::vector<double> all_x() const;
};

struct PartitionOptions {
  DistanceScale scale = DistanceScale::kGlobal;
};

// Groups records by chromosome, sorts each by position, reduces replicates to
// medians and rescales gaps. Chromosome labels are ordered naturally
// ("chr2" < "chr10").
Dataset partition_chromosomes(const RawDataset& raw, const PartitionOptions& options = {});

// Natural-order label comparison used for chromosome ordering.
bool natural_less(const std::string& a, const std::string& b);

// Audit table `chromosome,position,x,d`.
void write_normalized_table(std::ostream& out, const Dataset& data);

// Writes the dataset back in ingestible form (single median column).
void write_expression_table(std::ostream& out, const Dataset& data);

// Validates series invariants; throws ContractError.
void validate(const ChromosomeSeries& series);
void validate(const Dataset& data);

}  // namespace hmmix
