#include "citegrowth/graph.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "citegrowth/digest.hpp"

namespace citegrowth {

std::int64_t YearSchedule::node_count() const {
  std::int64_t n = 0;
  for (const auto& [year, degrees] : entries)
    n += static_cast<std::int64_t>(degrees.size());
  return n;
}

std::int64_t YearSchedule::edge_count() const {
  std::int64_t m = 0;
  for (const auto& [year, degrees] : entries)
    for (int k : degrees)
      m += k;
  return m;
}

void GrowthGraph::add_node(NodeRecord node) {
  if (node.id != static_cast<NodeId>(nodes_.size()))
    throw InvariantError("node id " + std::to_string(node.id) + " breaks dense insertion order");
  if (!(node.fitness > 0.0))
    throw InvariantError("node " + std::to_string(node.id) + " has non-positive fitness");
  node.out_degree = 0;
  nodes_.push_back(std::move(node));
  in_degree_.push_back(0);
}

void GrowthGraph::add_edge(NodeId citing, NodeId cited) {
  const auto n = static_cast<NodeId>(nodes_.size());
  if (citing < 0 || citing >= n || cited < 0 || cited >= n)
    throw InvariantError("edge (" + std::to_string(citing) + ", " + std::to_string(cited) +
                         ") references an unknown node");
  if (cited >= citing)
    throw InvariantError("edge (" + std::to_string(citing) + ", " + std::to_string(cited) +
                         ") does not point to an earlier node");
  if (nodes_[citing].year < nodes_[cited].year)
    throw InvariantError("edge (" + std::to_string(citing) + ", " + std::to_string(cited) +
                         ") cites a later year");
  edges_.push_back({citing, cited});
  ++nodes_[citing].out_degree;
  ++in_degree_[cited];
}

const NodeRecord& GrowthGraph::node(NodeId id) const {
  if (id < 0 || id >= static_cast<NodeId>(nodes_.size()))
    throw std::out_of_range("unknown node id " + std::to_string(id));
  return nodes_[id];
}

int GrowthGraph::in_degree(NodeId id) const {
  node(id);
  return in_degree_[id];
}

void GrowthGraph::set_seed_count(std::size_t n) {
  if (n > nodes_.size())
    throw std::invalid_argument("seed count exceeds node count");
  seed_count_ = n;
}

namespace {

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(std::begin(bytes), std::end(bytes));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

} // namespace

std::string GrowthGraph::canonical_bytes() const {
  std::string out;
  out.reserve(nodes_.size() * 48 + edges_.size() * 16 + 32);
  put_le<std::uint64_t>(out, nodes_.size());
  put_le<std::uint64_t>(out, seed_count_);
  for (const auto& n : nodes_) {
    put_le<std::int64_t>(out, n.id);
    put_le<std::int32_t>(out, n.year);
    put_le<double>(out, n.sub_year_time);
    put_le<double>(out, n.fitness);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(n.location.size()));
    for (Eigen::Index j = 0; j < n.location.size(); ++j)
      put_le<double>(out, n.location[j]);
    put_le<std::int32_t>(out, n.out_degree);
  }
  put_le<std::uint64_t>(out, edges_.size());
  for (const auto& e : edges_) {
    put_le<std::int64_t>(out, e.citing);
    put_le<std::int64_t>(out, e.cited);
  }
  return out;
}

std::string GrowthGraph::digest() const { return sha256_hex(canonical_bytes()); }

GrowthGraph seed_graph(std::span<const SeedNode> nodes, std::span<const Edge> edges) {
  std::unordered_map<NodeId, NodeId> dense;
  dense.reserve(nodes.size());
  GrowthGraph g;
  for (const auto& s : nodes) {
    const auto next = static_cast<NodeId>(dense.size());
    if (!dense.emplace(s.id, next).second)
      throw InputError("duplicate seed node id " + std::to_string(s.id));
    NodeRecord rec;
    rec.id = next;
    rec.year = s.year;
    g.add_node(std::move(rec));
  }
  for (const auto& e : edges) {
    auto citing = dense.find(e.citing);
    auto cited = dense.find(e.cited);
    if (citing == dense.end() || cited == dense.end())
      throw InputError("seed edge (" + std::to_string(e.citing) + ", " + std::to_string(e.cited) +
                       ") has a dangling endpoint");
    try {
      g.add_edge(citing->second, cited->second);
    } catch (const InvariantError& err) {
      throw InputError(std::string("seed edge (") + std::to_string(e.citing) + ", " +
                       std::to_string(e.cited) + "): " + err.what());
    }
  }
  g.mark_seed_boundary();
  return g;
}

std::vector<int> citation_history(const GrowthGraph& graph, NodeId node, int horizon_year) {
  const int year = graph.node(node).year;
  if (horizon_year < year)
    throw std::invalid_argument("horizon year precedes publication of node " + std::to_string(node));
  std::vector<int> counts(static_cast<std::size_t>(horizon_year - year + 1), 0);
  for (const auto& e : graph.edges()) {
    if (e.cited != node)
      continue;
    const int y = graph.nodes()[e.citing].year;
    if (y <= horizon_year)
      ++counts[static_cast<std::size_t>(y - year)];
  }
  return counts;
}

std::vector<std::vector<int>> citation_histories(const GrowthGraph& graph, int horizon_year) {
  const auto& nodes = graph.nodes();
  std::vector<std::vector<int>> out(nodes.size());
  for (const auto& n : nodes)
    if (n.year <= horizon_year)
      out[n.id].assign(static_cast<std::size_t>(horizon_year - n.year + 1), 0);
  for (const auto& e : graph.edges()) {
    const int y = nodes[e.citing].year;
    if (y <= horizon_year)
      ++out[e.cited][static_cast<std::size_t>(y - nodes[e.cited].year)];
  }
  return out;
}

void write_graph_dump(std::ostream& out, const GrowthGraph& graph) {
  std::ostringstream line;
  line << std::fixed << std::setprecision(6);
  for (const auto& n : graph.nodes()) {
    line.str({});
    line << "N " << n.id << ' ' << n.year << ' ' << n.sub_year_time << ' ' << n.fitness;
    for (Eigen::Index j = 0; j < n.location.size(); ++j)
      line << (j == 0 ? ' ' : ',') << n.location[j];
    line << '\n';
    out << line.str();
  }
  for (const auto& e : graph.edges())
    out << "E " << e.citing << ' ' << e.cited << '\n';
}

GrowthGraph read_graph_dump(std::istream& in, int seed_end_year) {
  GrowthGraph g;
  std::string line;
  std::size_t lineno = 0;
  std::size_t seed = 0;
  bool seed_open = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty())
      continue;
    std::istringstream ss(line);
    char tag = 0;
    ss >> tag;
    const auto where = " at dump line " + std::to_string(lineno);
    if (tag == 'N') {
      NodeRecord rec;
      std::string loc;
      if (!(ss >> rec.id >> rec.year >> rec.sub_year_time >> rec.fitness))
        throw InputError("malformed node record" + where);
      if (ss >> loc) {
        std::vector<double> coords;
        std::istringstream ls(loc);
        std::string tok;
        while (std::getline(ls, tok, ',')) {
          std::istringstream cs(tok);
          double c = 0.0;
          if (!(cs >> c) || !cs.eof())
            throw InputError("malformed location" + where);
          coords.push_back(c);
        }
        rec.location = Eigen::Map<const Eigen::VectorXd>(coords.data(), static_cast<Eigen::Index>(coords.size()));
      }
      try {
        g.add_node(std::move(rec));
      } catch (const InvariantError& err) {
        throw InputError(err.what() + where);
      }
      if (seed_open && g.nodes().back().year <= seed_end_year)
        ++seed;
      else
        seed_open = false;
    } else if (tag == 'E') {
      NodeId a = 0, b = 0;
      if (!(ss >> a >> b))
        throw InputError("malformed edge record" + where);
      try {
        g.add_edge(a, b);
      } catch (const InvariantError& err) {
        throw InputError(err.what() + where);
      }
    } else {
      throw InputError("unknown record tag" + where);
    }
  }
  g.set_seed_count(seed);
  return g;
}

} // namespace citegrowth
