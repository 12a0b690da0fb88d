#include "hmmix/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>
#include <utility>

#include "hmmix/error.hpp"
#include "hmmix/text.hpp"

namespace hmmix {

namespace {

char detect_delimiter(const std::string& header) {
  return header.find('\t') != std::string::npos ? '\t' : ',';
}

std::size_t require_column(const std::vector<std::string>& header, std::string_view name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw SchemaError("missing column '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

RawDataset parse_expression_table(std::istream& in, const TableFormat& format) {
  std::string line;
  std::size_t line_no = 0;
  // Skip leading blank lines.
  while (std::getline(in, line)) {
    ++line_no;
    if (!text::trim(line).empty()) break;
  }
  if (text::trim(line).empty()) throw EmptyInputError("expression table is empty");

  const char delim = format.delimiter ? format.delimiter : detect_delimiter(line);
  const auto header = text::split(line, delim);
  const std::size_t probe_col = require_column(header, "probe_id");
  const std::size_t chrom_col = require_column(header, "chromosome");
  const std::size_t pos_col = require_column(header, "position");

  std::vector<std::size_t> expr_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != probe_col && c != chrom_col && c != pos_col) expr_cols.push_back(c);
  }
  if (expr_cols.empty()) throw SchemaError("missing column 'expression' (need at least one)");
  if (format.columns == ExpressionColumns::kMedian && expr_cols.size() != 1) {
    throw SchemaError("median mode expects exactly one expression column, found " +
                      std::to_string(expr_cols.size()));
  }

  RawDataset out;
  out.replicate_count = expr_cols.size();
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto fields = text::split(line, delim);
    const std::string where = "row " + std::to_string(line_no);
    if (fields.size() != header.size()) {
      throw SchemaError(where + ": expected " + std::to_string(header.size()) + " fields, found " +
                        std::to_string(fields.size()));
    }
    RawRecord rec;
    rec.probe_id = fields[probe_col];
    rec.chromosome = fields[chrom_col];
    if (rec.probe_id.empty()) throw SchemaError(where + ": empty probe_id");
    if (rec.chromosome.empty()) throw SchemaError(where + ": empty chromosome");
    const auto pos = text::parse_int(fields[pos_col]);
    if (!pos) throw SchemaError(where + ": position '" + fields[pos_col] + "' is not an integer");
    if (*pos <= 0) throw SchemaError(where + ": position must be positive");
    rec.position = *pos;
    rec.expressions.reserve(expr_cols.size());
    for (std::size_t c : expr_cols) {
      const auto v = text::parse_double(fields[c]);
      if (!v || !std::isfinite(*v)) {
        throw SchemaError(where + ": column '" + header[c] + "' value '" + fields[c] +
                          "' is not a finite number");
      }
      rec.expressions.push_back(*v);
    }
    out.records.push_back(std::move(rec));
  }
  if (out.records.empty()) throw EmptyInputError("expression table has a header but no rows");
  return out;
}

RawDataset load_expression_table(const std::filesystem::path& path, const TableFormat& format) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open expression table " + path.string());
  return parse_expression_table(in, format);
}

DedupeResult dedupe_alignments(const RawDataset& raw) {
  std::map<std::string, std::size_t> probe_count;
  std::map<std::pair<std::string, std::int64_t>, std::size_t> site_count;
  for (const auto& r : raw.records) {
    ++probe_count[r.probe_id];
    ++site_count[{r.chromosome, r.position}];
  }
  DedupeResult out;
  out.dataset.replicate_count = raw.replicate_count;
  for (const auto& r : raw.records) {
    if (probe_count[r.probe_id] > 1 || site_count[{r.chromosome, r.position}] > 1) {
      ++out.removed;
      continue;
    }
    out.dataset.records.push_back(r);
  }
  return out;
}

double median(std::span<const double> values) {
  if (values.empty()) throw DomainError("median of an empty vector");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::vector<double> reduce_to_medians(const RawDataset& raw) {
  std::vector<double> out;
  out.reserve(raw.records.size());
  for (const auto& r : raw.records) out.push_back(median(r.expressions));
  return out;
}

std::int64_t max_gap(std::span<const std::vector<std::int64_t>> chromosomes) {
  std::int64_t best = 0;
  for (const auto& pos : chromosomes) {
    for (std::size_t i = 1; i < pos.size(); ++i) {
      best = std::max(best, std::max<std::int64_t>(pos[i] - pos[i - 1], 1));
    }
  }
  return best;
}

std::vector<double> rescale_distances(std::span<const std::int64_t> positions, std::int64_t g_max) {
  std::vector<double> d;
  if (positions.empty()) return d;
  d.reserve(positions.size());
  d.push_back(kFirstSiteDistance);
  if (positions.size() == 1) return d;
  if (g_max <= 1) {
    throw DegenerateScaleError("all gaps equal one; log-distance scale is degenerate");
  }
  const double log_max = std::log(static_cast<double>(g_max));
  for (std::size_t i = 1; i < positions.size(); ++i) {
    const std::int64_t gap = std::max<std::int64_t>(positions[i] - positions[i - 1], 1);
    if (gap > g_max) throw DomainError("gap exceeds the supplied maximum gap");
    d.push_back(std::log(static_cast<double>(gap)) / log_max);
  }
  return d;
}

bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j]))) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
      while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
      auto na = std::string_view(a).substr(i, ie - i);
      auto nb = std::string_view(b).substr(j, je - j);
      while (na.size() > 1 && na.front() == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb.front() == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
  return a < b;
}

std::size_t Dataset::total_n() const {
  std::size_t n = 0;
  for (const auto& s : series) n += s.size();
  return n;
}

std::vector<std::size_t> Dataset::offsets() const {
  std::vector<std::size_t> out;
  out.reserve(series.size() + 1);
  std::size_t acc = 0;
  for (const auto& s : series) {
    out.push_back(acc);
    acc += s.size();
  }
  out.push_back(acc);
  return out;
}

std::vector<double> Dataset::all_x() const {
  std::vector<double> out;
  out.reserve(total_n());
  for (const auto& s : series) out.insert(out.end(), s.x.begin(), s.x.end());
  return out;
}

Dataset partition_chromosomes(const RawDataset& raw, const PartitionOptions& options) {
  std::map<std::string, std::vector<const RawRecord*>, decltype(&natural_less)> groups(&natural_less);
  for (const auto& r : raw.records) groups[r.chromosome].push_back(&r);

  Dataset data;
  for (auto& [label, recs] : groups) {
    std::stable_sort(recs.begin(), recs.end(),
                     [](const RawRecord* a, const RawRecord* b) { return a->position < b->position; });
    ChromosomeSeries s;
    s.chromosome = label;
    for (const RawRecord* r : recs) {
      if (!s.positions.empty() && r->position == s.positions.back()) {
        throw ContractError("chromosome " + label + ": duplicate position " + std::to_string(r->position) +
                            " (run dedupe_alignments first)");
      }
      s.positions.push_back(r->position);
      s.x.push_back(median(r->expressions));
      s.probe_ids.push_back(r->probe_id);
    }
    data.series.push_back(std::move(s));
  }

  std::vector<std::vector<std::int64_t>> all_positions;
  for (const auto& s : data.series) all_positions.push_back(s.positions);
  const std::int64_t global_max = max_gap(all_positions);
  for (auto& s : data.series) {
    std::int64_t g = global_max;
    if (options.scale == DistanceScale::kPerChromosome) {
      g = max_gap(std::span<const std::vector<std::int64_t>>(&s.positions, 1));
    }
    s.d = rescale_distances(s.positions, g);
  }
  return data;
}

void write_normalized_table(std::ostream& out, const Dataset& data) {
  out << "chromosome,position,x,d\n";
  for (const auto& s : data.series) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      out << s.chromosome << ',' << s.positions[i] << ',' << text::format_double(s.x[i]) << ','
          << text::format_double(s.d[i]) << '\n';
    }
  }
}

void write_expression_table(std::ostream& out, const Dataset& data) {
  out << "probe_id,chromosome,position,x\n";
  std::size_t counter = 0;
  for (const auto& s : data.series) {
    for (std::size_t i = 0; i < s.size(); ++i, ++counter) {
      std::string id = i < s.probe_ids.size() && !s.probe_ids[i].empty() ? s.probe_ids[i]
                                                                         : "p" + std::to_string(counter);
      out << id << ',' << s.chromosome << ',' << s.positions[i] << ',' << text::format_double(s.x[i]) << '\n';
    }
  }
}

void validate(const ChromosomeSeries& s) {
  const std::size_t n = s.x.size();
  if (s.positions.size() != n || s.d.size() != n) {
    throw ContractError("chromosome " + s.chromosome + ": positions, x and d lengths differ");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && s.positions[i] <= s.positions[i - 1]) {
      throw ContractError("chromosome " + s.chromosome + ": positions not strictly increasing");
    }
    if (!(s.d[i] >= 0.0 && s.d[i] <= 1.0)) {
      throw ContractError("chromosome " + s.chromosome + ": rescaled distance outside [0,1]");
    }
    if (!std::isfinite(s.x[i])) throw ContractError("chromosome " + s.chromosome + ": non-finite x");
  }
}

void validate(const Dataset& data) {
  std::vector<std::string> labels;
  for (const auto& s : data.series) {
    validate(s);
    labels.push_back(s.chromosome);
  }
  std::sort(labels.begin(), labels.end());
  if (std::adjacent_find(labels.begin(), labels.end()) != labels.end()) {
    throw ContractError("chromosome labels are not unique");
  }
}

}  // namespace hmmix
