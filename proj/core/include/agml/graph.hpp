#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agml/corpus.hpp"
#include "agml/domain.hpp"

namespace agml {

using Edge = std::pair<std::string, std::string>;
using AttackPath = std::vector<std::string>;

/// Aggregated attack DAG for one domain. Node identity is the operation id.
/// Heads and tails are derived from the edge set on every call.
class AttackGraph {
public:
    AttackGraph() = default;
    explicit AttackGraph(Domain domain) : domain_(domain) {}

    Domain domain() const { return domain_; }
    const std::set<std::string>& nodes() const { return nodes_; }
    const std::set<Edge>& edges() const { return edges_; }

    void add_node(const std::string& id);
    // Adds both endpoints. Does not check for cycles; see is_acyclic().
    void add_edge(const std::string& src, const std::string& dst);

    bool has_node(std::string_view id) const;
    bool has_edge(std::string_view src, std::string_view dst) const;

    std::size_t in_degree(std::string_view id) const;
    std::size_t out_degree(std::string_view id) const;
    bool is_head(std::string_view id) const { return has_node(id) && in_degree(id) == 0; }
    bool is_tail(std::string_view id) const { return has_node(id) && out_degree(id) == 0; }

    std::vector<std::string> heads() const;
    std::vector<std::string> tails() const;
    std::vector<std::string> successors(std::string_view id) const;

    bool is_acyclic() const;
    // Empty when the graph is cyclic.
    std::vector<std::string> topological_order() const;

    bool operator==(const AttackGraph& other) const = default;

private:
    Domain domain_ = Domain::SdnCp;
    std::set<std::string> nodes_;
    std::set<Edge> edges_;
};

/// Builds the execution graph of one expression. Throws CycleIntroduced
/// naming the repeated operation when node merging closes a loop.
AttackGraph expr_to_graph(const AttackExpr& expr, Domain domain);

struct AggregationLog {
    Domain domain = Domain::SdnCp;
    std::size_t input_graphs = 0;
    std::size_t source_paths = 0;      // distinct paths over all inputs
    std::size_t aggregate_paths = 0;
    // Aggregate paths that are not a path of any single input.
    std::vector<AttackPath> emergent;
    // Input paths that no longer run head to tail because a shared node
    // gained an inbound or outbound edge. Each is a contiguous piece of
    // some aggregate path.
    std::vector<AttackPath> subsumed;
};

/// Union of nodes and edges. Inputs must share one domain (DomainMismatch);
/// a cycle in the union throws CycleIntroduced with the first offending edge
/// in sorted edge order.
AttackGraph aggregate(const std::vector<AttackGraph>& graphs, AggregationLog* log = nullptr);

inline constexpr std::size_t kDefaultPathLimit = 1'000'000;

struct PathEnumeration {
    std::vector<AttackPath> paths;
    bool overflow = false;
};

/// All head to tail paths, lexicographic by node id sequence.
PathEnumeration enumerate_paths(const AttackGraph& g, std::size_t limit = kDefaultPathLimit);

// Path count by dynamic programming over a topological order.
std::uint64_t count_paths(const AttackGraph& g);

std::string export_dot(const AttackGraph& g);
std::string export_json(const AttackGraph& g);
AttackGraph import_json(std::string_view text);

struct DomainGraphs {
    std::vector<AttackGraph> graphs;  // one per domain, kAllDomains order
    std::vector<AggregationLog> logs;

    const AttackGraph& at(Domain d) const;
};

// Groups corpus vectors by domain tag and aggregates each group.
DomainGraphs build_domain_graphs(const CorpusFile& corpus);

}  // namespace agml
