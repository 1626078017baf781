#include "citegrowth/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace citegrowth {

namespace {

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r')
    s.pop_back();
  return s;
}

bool split_tab(const std::string& line, std::string& a, std::string& b) {
  const auto tab = line.find('\t');
  if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
    return false;
  a = line.substr(0, tab);
  b = line.substr(tab + 1);
  return !a.empty() && !b.empty();
}

bool parse_int(const std::string& s, int& out) {
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot read " + path.string());
  return in;
}

} // namespace

PaperParse parse_papers(std::istream& in) {
  PaperParse out;
  std::set<std::string> seen;
  std::string line, id, year_text;
  long lineno = 0, lines = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty())
      continue;
    ++lines;
    int year = 0;
    if (!split_tab(line, id, year_text) || !parse_int(year_text, year) || year < kMinSaneYear ||
        year > kMaxSaneYear || !seen.insert(id).second) {
      ++out.malformed;
      if (out.malformed_lines.size() < 10)
        out.malformed_lines.push_back(lineno);
      continue;
    }
    out.records.push_back({id, year});
  }
  if (lines > 0 && static_cast<double>(out.malformed) > kMaxMalformedShare * static_cast<double>(lines)) {
    std::ostringstream msg;
    msg << out.malformed << " of " << lines << " paper lines are malformed (limit 1%); first at line(s)";
    for (long l : out.malformed_lines)
      msg << ' ' << l;
    throw InputError(msg.str());
  }
  return out;
}

PaperParse parse_papers(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_papers(in);
}

CitationParse parse_citations(std::istream& in, const std::vector<PaperRecord>& papers) {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(papers.size());
  for (std::size_t i = 0; i < papers.size(); ++i)
    index.emplace(papers[i].id, i);

  CitationParse out;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::string line, a, b;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty())
      continue;
    if (!split_tab(line, a, b)) {
      ++out.malformed;
      continue;
    }
    const auto ia = index.find(a);
    const auto ib = index.find(b);
    if (ia == index.end() || ib == index.end()) {
      ++out.unknown;
      continue;
    }
    if (ia->second == ib->second) {
      ++out.self_citations;
      continue;
    }
    if (!seen.emplace(ia->second, ib->second).second) {
      ++out.duplicates;
      continue;
    }
    out.edges.push_back({ia->second, ib->second});
  }
  return out;
}

CitationParse parse_citations(const std::filesystem::path& path, const std::vector<PaperRecord>& papers) {
  auto in = open_input(path);
  return parse_citations(in, papers);
}

void IngestConfig::validate() const {
  if (!(seed_start <= seed_end && seed_end < cutoff && cutoff <= horizon))
    throw std::invalid_argument("ingest years must satisfy seed_start <= seed_end < cutoff <= horizon");
}

IngestResult build_seed_and_schedule(const std::vector<PaperRecord>& papers, const std::vector<PaperLink>& edges,
                                     const IngestConfig& config) {
  config.validate();
  IngestResult out;

  // order inside the window: year, then input position
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < papers.size(); ++i) {
    if (papers[i].year < config.seed_start || papers[i].year > config.horizon)
      ++out.counters.papers_outside_window;
    else
      order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return papers[a].year < papers[b].year; });
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> rank(papers.size(), kNone);
  for (std::size_t r = 0; r < order.size(); ++r)
    rank[order[r]] = r;

  std::size_t seed_size = 0;
  while (seed_size < order.size() && papers[order[seed_size]].year <= config.seed_end)
    ++seed_size;
  if (seed_size == 0)
    throw InputError("no papers fall in the seed window " + std::to_string(config.seed_start) + "-" +
                     std::to_string(config.seed_end));

  std::vector<int> out_degree(order.size(), 0);
  for (const auto& e : edges) {
    const auto rc = rank[e.citing];
    const auto rd = rank[e.cited];
    if (rc == kNone || rd == kNone) {
      ++out.counters.edges_outside_window;
      continue;
    }
    const int yc = papers[e.citing].year;
    const int yd = papers[e.cited].year;
    if (yd > yc) {
      ++out.counters.edges_forward_in_time;
      continue;
    }
    if (rc < seed_size) {
      // seed edge: must point to an earlier seed node
      if (rd < rc)
        out.seed_edges.push_back({static_cast<NodeId>(rc), static_cast<NodeId>(rd)});
      else
        ++out.counters.edges_same_year;
      continue;
    }
    if (yd == yc) {
      ++out.counters.edges_same_year;
      continue;
    }
    ++out_degree[rc];
  }
  std::sort(out.seed_edges.begin(), out.seed_edges.end(), [](const Edge& a, const Edge& b) {
    return a.citing != b.citing ? a.citing < b.citing : a.cited < b.cited;
  });

  for (std::size_t r = 0; r < seed_size; ++r) {
    out.seed_nodes.push_back({static_cast<NodeId>(r), papers[order[r]].year});
    out.seed_paper_ids.push_back(papers[order[r]].id);
  }
  for (std::size_t r = seed_size; r < order.size(); ++r)
    out.schedule.entries[papers[order[r]].year].push_back(out_degree[r]);
  return out;
}

void write_schedule_tsv(std::ostream& out, const YearSchedule& schedule) {
  for (const auto& [year, degrees] : schedule.entries) {
    out << year << '\t';
    for (std::size_t i = 0; i < degrees.size(); ++i)
      out << (i ? "," : "") << degrees[i];
    out << '\n';
  }
}

YearSchedule read_schedule_tsv(std::istream& in) {
  YearSchedule s;
  std::string line, year_text, list;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty())
      continue;
    int year = 0;
    if (!split_tab(line, year_text, list) || !parse_int(year_text, year))
      throw InputError("schedule line " + std::to_string(lineno) + ": expected year<TAB>degrees");
    if (s.entries.contains(year))
      throw InputError("schedule line " + std::to_string(lineno) + ": year " + year_text + " repeated");
    auto& degrees = s.entries[year];
    std::istringstream ls(list);
    std::string tok;
    while (std::getline(ls, tok, ',')) {
      int k = 0;
      if (!parse_int(tok, k) || k < 0)
        throw InputError("schedule line " + std::to_string(lineno) + ": bad out-degree '" + tok + "'");
      degrees.push_back(k);
    }
  }
  return s;
}

namespace {

/// Splits `total` over consecutive years with weights growth^offset, using
/// largest remainders so the parts add up exactly.
std::vector<long> growth_split(long total, int years, double growth) {
  std::vector<double> w(static_cast<std::size_t>(years));
  for (int y = 0; y < years; ++y)
    w[static_cast<std::size_t>(y)] = std::pow(growth, y);
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<long> parts(w.size());
  std::vector<std::pair<double, std::size_t>> rema;
  long used = 0;
  for (std::size_t y = 0; y < w.size(); ++y) {
    const double exact = static_cast<double>(total) * w[y] / sum;
    parts[y] = static_cast<long>(std::floor(exact));
    used += parts[y];
    rema.emplace_back(exact - std::floor(exact), y);
  }
  std::stable_sort(rema.begin(), rema.end(), [](auto a, auto b) { return a.first > b.first; });
  for (long i = 0; i < total - used; ++i)
    ++parts[rema[static_cast<std::size_t>(i)].second];
  return parts;
}

int geometric(Rng& rng, double mean) {
  if (mean <= 0.0)
    return 0;
  const double q = mean / (1.0 + mean); // continuation probability
  const double u = 1.0 - uniform01(rng);
  return static_cast<int>(std::floor(std::log(u) / std::log(q)));
}

} // namespace

IngestResult synthetic_dataset(const SyntheticConfig& c, std::uint64_t rng_seed) {
  if (c.seed_start > c.seed_end || c.seed_end >= c.last_year)
    throw std::invalid_argument("synthetic years must satisfy seed_start <= seed_end < last_year");
  if (!(c.seed_share > 0.0 && c.seed_share < 1.0) || !(c.yearly_growth > 0.0))
    throw std::invalid_argument("synthetic seed share must lie in (0, 1) and growth must be positive");
  const long seed_nodes = std::max(2L, std::lround(static_cast<double>(c.total_nodes) * c.seed_share));
  if (c.total_nodes <= seed_nodes)
    throw std::invalid_argument("synthetic dataset needs more nodes than its seed");
  Rng rng(rng_seed);
  IngestResult out;

  const auto seed_years = growth_split(seed_nodes, c.seed_end - c.seed_start + 1, c.yearly_growth);
  for (std::size_t y = 0; y < seed_years.size(); ++y)
    for (long j = 0; j < seed_years[y]; ++j) {
      const auto id = static_cast<NodeId>(out.seed_nodes.size());
      out.seed_nodes.push_back({id, c.seed_start + static_cast<int>(y)});
      out.seed_paper_ids.push_back("s" + std::to_string(id));
    }
  for (NodeId r = 1; r < static_cast<NodeId>(out.seed_nodes.size()); ++r) {
    const int k = std::min<int>(geometric(rng, c.seed_mean_refs), static_cast<int>(r));
    std::vector<NodeId> pool(static_cast<std::size_t>(r));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
      const auto pick = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(pool.size()));
      out.seed_edges.push_back({r, pool[pick]});
      pool[pick] = pool.back();
      pool.pop_back();
    }
  }
  std::sort(out.seed_edges.begin(), out.seed_edges.end(), [](const Edge& a, const Edge& b) {
    return a.citing != b.citing ? a.citing < b.citing : a.cited < b.cited;
  });

  const int years = c.last_year - c.seed_end;
  const auto counts = growth_split(c.total_nodes - seed_nodes, years, c.yearly_growth);
  long available = seed_nodes;
  for (int y = 0; y < years; ++y) {
    const double frac = years > 1 ? static_cast<double>(y) / (years - 1) : 0.0;
    const double mean = c.mean_refs_first + frac * (c.mean_refs_last - c.mean_refs_first);
    auto& degrees = out.schedule.entries[c.seed_end + 1 + y];
    for (long j = 0; j < counts[static_cast<std::size_t>(y)]; ++j)
      degrees.push_back(static_cast<int>(std::min<long>(geometric(rng, mean), available)));
    available += counts[static_cast<std::size_t>(y)];
  }
  return out;
}

} // namespace citegrowth
