#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "citegrowth/graph.hpp"

namespace citegrowth {

struct PaperRecord {
  std::string id;
  int year = 0;
};

inline constexpr int kMinSaneYear = 1800;
inline constexpr int kMaxSaneYear = 2100;
/// Parsing aborts when more than this share of lines is malformed.
inline constexpr double kMaxMalformedShare = 0.01;

struct PaperParse {
  std::vector<PaperRecord> records;
  long malformed = 0;
  std::vector<long> malformed_lines; // first few offending line numbers
};

/// Reads `id<TAB>year` lines. Lines with a bad year, a year outside
/// [1800, 2100] or a repeated id count as malformed.
PaperParse parse_papers(std::istream& in);
PaperParse parse_papers(const std::filesystem::path& path);

/// Citation between two papers, as indices into the paper list.
struct PaperLink {
  std::size_t citing = 0;
  std::size_t cited = 0;
  friend bool operator==(const PaperLink&, const PaperLink&) = default;
};

struct CitationParse {
  std::vector<PaperLink> edges;
  long unknown = 0;
  long self_citations = 0;
  long duplicates = 0;
  long malformed = 0;
};

/// Reads `citing<TAB>cited` lines, keeping edges between known papers.
CitationParse parse_citations(std::istream& in, const std::vector<PaperRecord>& papers);
CitationParse parse_citations(const std::filesystem::path& path, const std::vector<PaperRecord>& papers);

struct IngestConfig {
  int seed_start = 1960;
  int seed_end = 1975;
  int cutoff = 2000;
  int horizon = 2010;

  void validate() const;
};

struct IngestCounters {
  long papers_outside_window = 0;
  long edges_outside_window = 0;
  long edges_forward_in_time = 0;   // cited paper is younger than the citing one
  long edges_same_year = 0;         // not realisable in the growth order
};

/// Seed network (dense ids 0..n-1 ordered by year, then input order) and the
/// per-year out-degrees of later papers. A scheduled paper's out-degree counts
/// only citations to papers from strictly earlier years.
struct IngestResult {
  std::vector<SeedNode> seed_nodes;
  std::vector<Edge> seed_edges;
  YearSchedule schedule;
  std::vector<std::string> seed_paper_ids; // original id of each seed node
  IngestCounters counters;
};

IngestResult build_seed_and_schedule(const std::vector<PaperRecord>& papers, const std::vector<PaperLink>& edges,
                                     const IngestConfig& config);

/// `year<TAB>d1,d2,...` per scheduled year.
void write_schedule_tsv(std::ostream& out, const YearSchedule& schedule);
YearSchedule read_schedule_tsv(std::istream& in);

/// Shape of a synthetic dataset resembling the MAS computer-science network
/// scaled down to `total_nodes`: seed share, yearly exponential growth, and
/// mean reference counts rising over time.
struct SyntheticConfig {
  long total_nodes = 20000;
  int seed_start = 1960;
  int seed_end = 1975;
  int last_year = 2000;
  double seed_share = 4134.0 / 282919.0;
  double seed_mean_refs = 4872.0 / 4134.0;
  double yearly_growth = 1.10;
  double mean_refs_first = 1.2;
  double mean_refs_last = 3.0;
};

IngestResult synthetic_dataset(const SyntheticConfig& config, std::uint64_t rng_seed);

} // namespace citegrowth
