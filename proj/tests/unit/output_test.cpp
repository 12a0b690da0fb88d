#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hmmix/error.hpp"
#include "hmmix/output.hpp"
#include "support.hpp"

namespace hmmix {
namespace {

PosteriorSample tiny_sample() {
  PosteriorSample s;
  s.K = 1;
  s.chromosomes = {"chr1", "chr2"};
  s.offsets = {0, 2, 3};
  s.positions = {10, 20, 5};
  s.parameter_names = parameter_names(1);
  const std::size_t P = s.parameter_names.size();
  for (std::size_t m = 0; m < 3; ++m) {
    s.iterations.push_back(m + 8);
    for (std::size_t p = 0; p < P; ++p) s.trace.push_back(0.1 * static_cast<double>(p) + 1.0 / (3.0 + m));
  }
  s.allocation_counts = {3, 0, 1, 2, 0, 3};
  s.gaussian_draws = {{0, 1, 1}, {0, 0, 1}};
  return s;
}

TEST(Trace, RoundTripIsExact) {
  const auto s = tiny_sample();
  std::stringstream io;
  write_trace(io, s);
  const auto t = read_trace(io);
  EXPECT_EQ(t.names, s.parameter_names);
  EXPECT_EQ(t.iterations, s.iterations);
  EXPECT_EQ(t.values, s.trace);
  EXPECT_EQ(t.column(1), s.column(1));
}

TEST(Trace, HeaderStartsWithIteration) {
  std::stringstream io;
  write_trace(io, tiny_sample());
  std::string header;
  std::getline(io, header);
  EXPECT_EQ(header.rfind("iteration\t", 0), 0u);
}

TEST(Trace, MalformedInputIsASchemaError) {
  std::istringstream empty("");
  EXPECT_THROW(read_trace(empty), SchemaError);
  std::istringstream bad("iteration\ta\n1\tx\n");
  EXPECT_THROW(read_trace(bad), SchemaError);
  std::istringstream ragged("iteration\ta\tb\n1\t2\n");
  EXPECT_THROW(read_trace(ragged), SchemaError);
}

TEST(Probabilities, RoundTrip) {
  const auto s = tiny_sample();
  const auto layout = SiteLayout::from(s);
  const std::vector<double> p{0.0, 1.0 / 3.0, 1.0};
  std::stringstream io;
  write_probabilities(io, layout, p);
  EXPECT_EQ(io.str().substr(0, 32), "chromosome,position,p_gaussian\nc");
  const auto t = read_probabilities(io);
  EXPECT_EQ(t.probabilities, p);
  EXPECT_EQ(t.layout.chromosomes, layout.chromosomes);
  EXPECT_EQ(t.layout.offsets, layout.offsets);
  EXPECT_EQ(t.layout.positions, layout.positions);
}

TEST(Probabilities, RejectsOutOfRangeAndSplitChromosomes) {
  std::istringstream range("chromosome,position,p_gaussian\nc,1,1.5\n");
  EXPECT_THROW(read_probabilities(range), SchemaError);
  std::istringstream split("chromosome,position,p_gaussian\na,1,0.5\nb,1,0.5\na,2,0.5\n");
  EXPECT_THROW(read_probabilities(split), SchemaError);
  std::istringstream header("chrom,pos,p\na,1,0.5\n");
  EXPECT_THROW(read_probabilities(header), SchemaError);
}

TEST(Allocations, RoundTripRowsSumToOne) {
  const auto s = tiny_sample();
  std::stringstream io;
  write_allocations(io, s);
  std::string header;
  std::getline(io, header);
  EXPECT_EQ(header, "chromosome,position,p_1,p_gaussian");
  io.seekg(0);
  const auto t = read_allocations(io);
  ASSERT_EQ(t.components, 2u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(t.means[2 * i] + t.means[2 * i + 1], 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(t.means[3], 2.0 / 3.0);
}

TEST(GaussianDraws, RoundTripAndLengthCheck) {
  const auto s = tiny_sample();
  std::stringstream io;
  write_gaussian_draws(io, s.gaussian_draws);
  EXPECT_EQ(io.str(), "011\n001\n");
  EXPECT_EQ(read_gaussian_draws(io, 3), s.gaussian_draws);
  std::istringstream bad("0110\n");
  EXPECT_THROW(read_gaussian_draws(bad, 3), SchemaError);
  std::istringstream chars("012\n");
  EXPECT_THROW(read_gaussian_draws(chars, 3), SchemaError);
}

TEST(Acceptance, Table) {
  AcceptanceReport r;
  r.rate = {0.5};
  r.accepted = {5};
  r.attempted = {10};
  r.proposal_sd = {1.25};
  std::ostringstream out;
  write_acceptance(out, r);
  EXPECT_EQ(out.str(), "parameter\taccepted\tattempted\trate\tproposal_sd\neta_1\t5\t10\t0.5\t1.25\n");
}

TEST(Files, OpenFailuresAreSchemaErrors) {
  EXPECT_THROW(open_input("/nonexistent/dir/file"), SchemaError);
  EXPECT_THROW(open_output("/nonexistent/dir/file"), SchemaError);
}

}  // namespace
}  // namespace hmmix
