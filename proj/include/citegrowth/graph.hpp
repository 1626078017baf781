#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "citegrowth/common.hpp"

namespace citegrowth {

struct NodeRecord {
  NodeId id = 0;
  int year = 0;
  double sub_year_time = 0.0; // position within the year, in [0, 1)
  double fitness = 1.0;
  Location location;          // empty for models without a location space
  int out_degree = 0;
};

struct Edge {
  NodeId citing = 0;
  NodeId cited = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct SeedNode {
  NodeId id = 0;
  int year = 0;
};

/// Out-degrees of the papers entering in each year, in arrival order.
struct YearSchedule {
  std::map<int, std::vector<int>> entries;

  std::int64_t node_count() const;
  std::int64_t edge_count() const;
  bool empty() const { return entries.empty(); }
};

/// Time-stamped citation DAG. Node ids are dense and follow insertion order;
/// a node may only cite nodes inserted before it.
class GrowthGraph {
public:
  GrowthGraph() = default;

  /// Appends a node; its id must equal the current node count.
  void add_node(NodeRecord node);
  /// Appends an edge from `citing` to an earlier node.
  void add_edge(NodeId citing, NodeId cited);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const NodeRecord& node(NodeId id) const;
  const std::vector<NodeRecord>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int in_degree(NodeId id) const;
  std::span<const int> in_degrees() const { return in_degree_; }

  /// Leading nodes that came from the seed network.
  std::size_t seed_count() const { return seed_count_; }
  void mark_seed_boundary() { seed_count_ = nodes_.size(); }
  void set_seed_count(std::size_t n);

  /// Little-endian binary encoding of every node and edge, in order.
  std::string canonical_bytes() const;
  /// Hex SHA-256 of canonical_bytes().
  std::string digest() const;

private:
  std::vector<NodeRecord> nodes_;
  std::vector<Edge> edges_;
  std::vector<int> in_degree_;
  std::size_t seed_count_ = 0;
};

/// Builds a graph holding exactly the seed nodes and edges. Seed node ids are
/// remapped to dense ids in the given order; edges must reference seed ids.
/// Attributes are filled by the caller (see init_from_seed in simulation.hpp).
GrowthGraph seed_graph(std::span<const SeedNode> nodes, std::span<const Edge> edges);

/// Yearly in-citation counts of `node` from its publication year through
/// `horizon_year` inclusive.
std::vector<int> citation_history(const GrowthGraph& graph, NodeId node, int horizon_year);

/// Per-node histories for every node published on or before `horizon_year`,
/// computed in one pass over the edge list. Nodes past the horizon get empty lists.
std::vector<std::vector<int>> citation_histories(const GrowthGraph& graph, int horizon_year);

/// Text dump: `N <id> <year> <sub_year_time> <fitness> [loc_0,...]` lines
/// followed by `E <citing> <cited>` lines.
void write_graph_dump(std::ostream& out, const GrowthGraph& graph);
/// Reads a dump; nodes with year <= seed_end_year count as seed nodes.
GrowthGraph read_graph_dump(std::istream& in, int seed_end_year);

} // namespace citegrowth
