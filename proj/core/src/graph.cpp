#include "agml/graph.hpp"

#include <algorithm>
#include <map>
#include <nlohmann/json.hpp>

#include "agml/errors.hpp"

namespace agml {

using json = nlohmann::json;

void AttackGraph::add_node(const std::string& id) { nodes_.insert(id); }

void AttackGraph::add_edge(const std::string& src, const std::string& dst) {
    nodes_.insert(src);
    nodes_.insert(dst);
    edges_.emplace(src, dst);
}

bool AttackGraph::has_node(std::string_view id) const {
    return nodes_.find(std::string(id)) != nodes_.end();
}

bool AttackGraph::has_edge(std::string_view src, std::string_view dst) const {
    return edges_.count(Edge(std::string(src), std::string(dst))) != 0;
}

std::size_t AttackGraph::in_degree(std::string_view id) const {
    return static_cast<std::size_t>(
        std::count_if(edges_.begin(), edges_.end(), [&](const Edge& e) { return e.second == id; }));
}

std::size_t AttackGraph::out_degree(std::string_view id) const {
    // Edges are sorted by source, so the out-edges form one run.
    auto lo = edges_.lower_bound(Edge(std::string(id), std::string()));
    std::size_t n = 0;
    for (auto it = lo; it != edges_.end() && it->first == id; ++it) ++n;
    return n;
}

std::vector<std::string> AttackGraph::heads() const {
    std::set<std::string> has_in;
    for (const auto& e : edges_) has_in.insert(e.second);
    std::vector<std::string> out;
    for (const auto& n : nodes_)
        if (!has_in.count(n)) out.push_back(n);
    return out;
}

std::vector<std::string> AttackGraph::tails() const {
    std::set<std::string> has_out;
    for (const auto& e : edges_) has_out.insert(e.first);
    std::vector<std::string> out;
    for (const auto& n : nodes_)
        if (!has_out.count(n)) out.push_back(n);
    return out;
}

std::vector<std::string> AttackGraph::successors(std::string_view id) const {
    std::vector<std::string> out;
    auto lo = edges_.lower_bound(Edge(std::string(id), std::string()));
    for (auto it = lo; it != edges_.end() && it->first == id; ++it) out.push_back(it->second);
    return out;
}

std::vector<std::string> AttackGraph::topological_order() const {
    std::map<std::string, std::size_t> indeg;
    for (const auto& n : nodes_) indeg[n] = 0;
    for (const auto& e : edges_) ++indeg[e.second];
    std::set<std::string> ready;
    for (const auto& [n, d] : indeg)
        if (d == 0) ready.insert(n);
    std::vector<std::string> order;
    while (!ready.empty()) {
        std::string n = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(n);
        for (const auto& s : successors(n))
            if (--indeg[s] == 0) ready.insert(s);
    }
    if (order.size() != nodes_.size()) return {};
    return order;
}

bool AttackGraph::is_acyclic() const {
    return nodes_.empty() || !topological_order().empty();
}

namespace {

using Adjacency = std::map<std::string, std::vector<std::string>>;

Adjacency adjacency(const AttackGraph& g) {
    Adjacency adj;
    for (const auto& n : g.nodes()) adj[n];
    for (const auto& [a, b] : g.edges()) adj[a].push_back(b);
    return adj;
}

bool reaches(const Adjacency& adj, const std::string& from, const std::string& to) {
    std::vector<std::string> stack{from};
    std::set<std::string> seen{from};
    while (!stack.empty()) {
        std::string n = stack.back();
        stack.pop_back();
        if (n == to) return true;
        for (const auto& s : adj.at(n))
            if (seen.insert(s).second) stack.push_back(s);
    }
    return false;
}

// First edge in sorted order that lies on a cycle.
Edge cyclic_edge(const AttackGraph& g) {
    Adjacency adj = adjacency(g);
    for (const auto& e : g.edges())
        if (reaches(adj, e.second, e.first)) return e;
    return {};
}

struct Fragment {
    std::set<std::string> heads;
    std::set<std::string> tails;
};

Fragment build(const AttackExpr& e, AttackGraph& g) {
    switch (e.kind) {
        case AttackExpr::Kind::Atom:
            g.add_node(e.op);
            return {{e.op}, {e.op}};
        case AttackExpr::Kind::Union: {
            Fragment f;
            for (const auto& c : e.children) {
                Fragment cf = build(c, g);
                f.heads.insert(cf.heads.begin(), cf.heads.end());
                f.tails.insert(cf.tails.begin(), cf.tails.end());
            }
            return f;
        }
        case AttackExpr::Kind::Concat: {
            Fragment f = build(e.children.front(), g);
            for (std::size_t i = 1; i < e.children.size(); ++i) {
                Fragment next = build(e.children[i], g);
                for (const auto& t : f.tails)
                    for (const auto& h : next.heads) g.add_edge(t, h);
                f.tails = std::move(next.tails);
            }
            return f;
        }
    }
    return {};
}

}  // namespace

AttackGraph expr_to_graph(const AttackExpr& expr, Domain domain) {
    AttackGraph g(domain);
    build(expr, g);
    if (!g.is_acyclic()) {
        Edge e = cyclic_edge(g);
        throw Error(ErrorCode::CycleIntroduced,
                    "operation " + e.second + " repeats along a path (edge " + e.first + " -> " +
                        e.second + "); alias the later occurrence");
    }
    return g;
}

AttackGraph aggregate(const std::vector<AttackGraph>& graphs, AggregationLog* log) {
    if (graphs.empty()) throw Error(ErrorCode::InvalidArgument, "aggregate of no graphs");
    Domain domain = graphs.front().domain();
    AttackGraph out(domain);
    for (const auto& g : graphs) {
        if (g.domain() != domain)
            throw Error(ErrorCode::DomainMismatch, std::string(to_string(g.domain())) + " vs " +
                                                       std::string(to_string(domain)));
        for (const auto& n : g.nodes()) out.add_node(n);
        for (const auto& [a, b] : g.edges()) out.add_edge(a, b);
    }
    if (!out.is_acyclic()) {
        Edge e = cyclic_edge(out);
        throw Error(ErrorCode::CycleIntroduced, "edge " + e.first + " -> " + e.second);
    }
    if (log) {
        std::set<AttackPath> source;
        for (const auto& g : graphs)
            for (auto& p : enumerate_paths(g).paths) source.insert(std::move(p));
        auto agg = enumerate_paths(out).paths;
        std::set<AttackPath> agg_set(agg.begin(), agg.end());

        log->domain = domain;
        log->input_graphs = graphs.size();
        log->source_paths = source.size();
        log->aggregate_paths = agg.size();
        log->emergent.clear();
        log->subsumed.clear();
        for (const auto& p : agg)
            if (!source.count(p)) log->emergent.push_back(p);
        for (const auto& p : source)
            if (!agg_set.count(p)) log->subsumed.push_back(p);
    }
    return out;
}

namespace {

void walk(const Adjacency& adj, AttackPath& prefix, std::size_t limit, PathEnumeration& out) {
    const auto& next = adj.at(prefix.back());
    if (next.empty()) {
        if (out.paths.size() >= limit) {
            out.overflow = true;
            return;
        }
        out.paths.push_back(prefix);
        return;
    }
    for (const auto& s : next) {
        if (out.overflow) return;
        prefix.push_back(s);
        walk(adj, prefix, limit, out);
        prefix.pop_back();
    }
}

}  // namespace

PathEnumeration enumerate_paths(const AttackGraph& g, std::size_t limit) {
    PathEnumeration out;
    Adjacency adj = adjacency(g);
    for (const auto& h : g.heads()) {
        AttackPath prefix{h};
        walk(adj, prefix, limit, out);
        if (out.overflow) break;
    }
    return out;
}

std::uint64_t count_paths(const AttackGraph& g) {
    auto order = g.topological_order();
    Adjacency adj = adjacency(g);
    std::map<std::string, std::uint64_t> from;
    std::uint64_t total = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto& next = adj.at(*it);
        std::uint64_t n = next.empty() ? 1 : 0;
        for (const auto& s : next) n += from[s];
        from[*it] = n;
    }
    for (const auto& h : g.heads()) total += from[h];
    return total;
}

std::string export_dot(const AttackGraph& g) {
    std::string label(to_string(g.domain()));
    std::string out = "digraph \"" + label + "\" {\n";
    out += "  label=\"" + label + "\";\n";
    out += "  rankdir=LR;\n";
    for (const auto& n : g.nodes()) {
        out += "  \"" + n + "\"";
        if (g.is_head(n)) out += " [shape=doublecircle]";
        out += ";\n";
    }
    for (const auto& [a, b] : g.edges()) out += "  \"" + a + "\" -> \"" + b + "\";\n";
    out += "}\n";
    return out;
}

std::string export_json(const AttackGraph& g) {
    json j;
    j["domain"] = std::string(to_string(g.domain()));
    j["nodes"] = json::array();
    for (const auto& n : g.nodes()) j["nodes"].push_back(n);
    j["edges"] = json::array();
    for (const auto& [a, b] : g.edges()) j["edges"].push_back({a, b});
    return j.dump(2) + "\n";
}

AttackGraph import_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw MalformedInput(e.byte, e.what());
    }
    if (!j.is_object() || !j.contains("domain") || !j.contains("nodes") || !j.contains("edges"))
        throw MalformedInput(0, "graph JSON needs domain, nodes and edges");
    if (!j["domain"].is_string() || !j["nodes"].is_array() || !j["edges"].is_array())
        throw MalformedInput(0, "graph JSON fields have the wrong type");
    auto domain = parse_domain(j["domain"].get<std::string>());
    if (!domain) throw MalformedInput(0, "unknown domain " + j["domain"].dump());

    AttackGraph g(*domain);
    const auto& nodes = j["nodes"];
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!nodes[i].is_string()) throw MalformedInput(i, "node entry is not a string");
        g.add_node(nodes[i].get<std::string>());
    }
    const auto& edges = j["edges"];
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto& e = edges[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
            throw MalformedInput(i, "edge entry must be [src, dst]");
        auto a = e[0].get<std::string>(), b = e[1].get<std::string>();
        if (!g.has_node(a) || !g.has_node(b))
            throw MalformedInput(i, "edge " + a + " -> " + b + " names an undeclared node");
        g.add_edge(a, b);
    }
    if (!g.is_acyclic()) {
        Edge e = cyclic_edge(g);
        throw Error(ErrorCode::CycleIntroduced, "edge " + e.first + " -> " + e.second);
    }
    return g;
}

const AttackGraph& DomainGraphs::at(Domain d) const {
    return graphs.at(static_cast<std::size_t>(d));
}

DomainGraphs build_domain_graphs(const CorpusFile& corpus) {
    DomainGraphs out;
    for (Domain d : kAllDomains) {
        std::vector<AttackGraph> parts;
        for (const auto& v : corpus.vectors)
            if (v.domain == d) parts.push_back(expr_to_graph(v.expr, d));
        AggregationLog log;
        log.domain = d;
        if (parts.empty()) {
            out.graphs.emplace_back(d);
        } else {
            out.graphs.push_back(aggregate(parts, &log));
        }
        out.logs.push_back(std::move(log));
    }
    return out;
}

}  // namespace agml
