#include "hmmix/output.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "hmmix/error.hpp"
#include "hmmix/text.hpp"

namespace hmmix {

namespace {

bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!text::trim(line).empty()) return true;
  }
  return false;
}

double field_double(const std::string& s, std::size_t row, const char* what) {
  auto v = text::parse_double(s);
  if (!v) throw SchemaError("row " + std::to_string(row) + ": bad " + what + " '" + s + "'");
  return *v;
}

std::int64_t field_int(const std::string& s, std::size_t row, const char* what) {
  auto v = text::parse_int(s);
  if (!v) throw SchemaError("row " + std::to_string(row) + ": bad " + what + " '" + s + "'");
  return *v;
}

void append_site(SiteLayout& layout, const std::string& chrom, std::int64_t pos) {
  if (layout.chromosomes.empty() || layout.chromosomes.back() != chrom) {
    for (const auto& c : layout.chromosomes) {
      if (c == chrom) throw SchemaError("chromosome '" + chrom + "' is not contiguous");
    }
    layout.chromosomes.push_back(chrom);
    layout.offsets.push_back(layout.positions.size());
  }
  layout.positions.push_back(pos);
}

void close_layout(SiteLayout& layout) { layout.offsets.push_back(layout.positions.size()); }

}  // namespace

void write_trace(std::ostream& out, const PosteriorSample& sample) {
  out << "iteration";
  for (const auto& name : sample.parameter_names) out << '\t' << name;
  out << '\n';
  const std::size_t P = sample.parameters();
  for (std::size_t m = 0; m < sample.M(); ++m) {
    out << sample.iterations[m];
    for (std::size_t p = 0; p < P; ++p) out << '\t' << text::format_double(sample.value(m, p));
    out << '\n';
  }
}

std::vector<double> TraceTable::column(std::size_t param) const {
  std::vector<double> out(draws());
  for (std::size_t m = 0; m < draws(); ++m) out[m] = values[m * names.size() + param];
  return out;
}

TraceTable read_trace(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw SchemaError("trace file is empty");
  auto header = text::split(line, '\t');
  if (header.empty() || header.front() != "iteration") throw SchemaError("missing column 'iteration'");
  TraceTable t;
  t.names.assign(header.begin() + 1, header.end());
  std::size_t row = 1;
  while (next_line(in, line)) {
    ++row;
    auto f = text::split(line, '\t');
    if (f.size() != header.size()) throw SchemaError("row " + std::to_string(row) + ": wrong number of fields");
    t.iterations.push_back(static_cast<std::size_t>(field_int(f[0], row, "iteration")));
    for (std::size_t p = 1; p < f.size(); ++p) t.values.push_back(field_double(f[p], row, "value"));
  }
  return t;
}

void write_probabilities(std::ostream& out, const SiteLayout& layout, const std::vector<double>& probabilities) {
  if (probabilities.size() != layout.size()) throw ContractError("one probability per location expected");
  out << "chromosome,position,p_gaussian\n";
  for (std::size_t c = 0; c < layout.chromosomes.size(); ++c) {
    for (std::size_t i = layout.offsets[c]; i < layout.offsets[c + 1]; ++i) {
      out << layout.chromosomes[c] << ',' << layout.positions[i] << ',' << text::format_double(probabilities[i])
          << '\n';
    }
  }
}

ProbabilityTable read_probabilities(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw SchemaError("probability file is empty");
  const auto header = text::split(line, ',');
  const std::vector<std::string> expected{"chromosome", "position", "p_gaussian"};
  for (std::size_t j = 0; j < expected.size(); ++j) {
    if (j >= header.size() || text::trim(header[j]) != expected[j]) {
      throw SchemaError("missing column '" + expected[j] + "'");
    }
  }
  ProbabilityTable t;
  std::size_t row = 1;
  while (next_line(in, line)) {
    ++row;
    auto f = text::split(line, ',');
    if (f.size() != 3) throw SchemaError("row " + std::to_string(row) + ": wrong number of fields");
    append_site(t.layout, std::string(text::trim(f[0])), field_int(f[1], row, "position"));
    const double p = field_double(f[2], row, "probability");
    if (!(p >= 0.0 && p <= 1.0)) throw SchemaError("row " + std::to_string(row) + ": probability outside [0, 1]");
    t.probabilities.push_back(p);
  }
  close_layout(t.layout);
  return t;
}

void write_allocations(std::ostream& out, const PosteriorSample& sample) {
  const std::size_t K1 = sample.K + 1;
  out << "chromosome,position";
  for (std::size_t k = 0; k < sample.K; ++k) out << ",p_" << k + 1;
  out << ",p_gaussian\n";
  const double M = static_cast<double>(sample.M());
  for (std::size_t c = 0; c < sample.chromosomes.size(); ++c) {
    for (std::size_t i = sample.offsets[c]; i < sample.offsets[c + 1]; ++i) {
      out << sample.chromosomes[c] << ',' << sample.positions[i];
      for (std::size_t k = 0; k < K1; ++k) {
        const double mean = M > 0 ? sample.allocation_counts[i * K1 + k] / M : 0.0;
        out << ',' << text::format_double(mean);
      }
      out << '\n';
    }
  }
}

AllocationTable read_allocations(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw SchemaError("allocation file is empty");
  const auto header = text::split(line, ',');
  if (header.size() < 4 || header[0] != "chromosome" || header[1] != "position" || header.back() != "p_gaussian") {
    throw SchemaError("allocation header must be chromosome,position,p_1..p_K,p_gaussian");
  }
  AllocationTable t;
  t.components = header.size() - 2;
  std::size_t row = 1;
  while (next_line(in, line)) {
    ++row;
    auto f = text::split(line, ',');
    if (f.size() != header.size()) throw SchemaError("row " + std::to_string(row) + ": wrong number of fields");
    append_site(t.layout, std::string(text::trim(f[0])), field_int(f[1], row, "position"));
    for (std::size_t k = 2; k < f.size(); ++k) t.means.push_back(field_double(f[k], row, "mean"));
  }
  close_layout(t.layout);
  return t;
}

void write_gaussian_draws(std::ostream& out, const GaussianDraws& draws) {
  std::string buf;
  for (const auto& d : draws) {
    buf.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) buf[i] = d[i] ? '1' : '0';
    out << buf << '\n';
  }
}

GaussianDraws read_gaussian_draws(std::istream& in, std::size_t n) {
  GaussianDraws draws;
  std::string line;
  std::size_t row = 0;
  while (next_line(in, line)) {
    ++row;
    const auto s = text::trim(line);
    if (s.size() != n) throw SchemaError("draw " + std::to_string(row) + ": expected " + std::to_string(n) + " flags");
    std::vector<std::uint8_t> d(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (s[i] != '0' && s[i] != '1') throw SchemaError("draw " + std::to_string(row) + ": flags must be 0 or 1");
      d[i] = s[i] == '1';
    }
    draws.push_back(std::move(d));
  }
  return draws;
}

void write_acceptance(std::ostream& out, const AcceptanceReport& report) {
  out << "parameter\taccepted\tattempted\trate\tproposal_sd\n";
  for (std::size_t k = 0; k < report.rate.size(); ++k) {
    out << "eta_" << k + 1 << '\t' << report.accepted[k] << '\t' << report.attempted[k] << '\t'
        << text::format_double(report.rate[k]) << '\t' << text::format_double(report.proposal_sd[k]) << '\n';
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write '" + path.string() + "'");
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read '" + path.string() + "'");
  return in;
}

}  // namespace hmmix
