#ifndef PSEUDOENT_TNGRAPH_HPP
#define PSEUDOENT_TNGRAPH_HPP

// Isometric tensor-network graphs: unitaries fed by product or Bell inputs,
// with every dangling leg terminating in an output vertex.
//
// The legs of a unitary are ordered by edge insertion order. Its input
// register is the tensor product of the incoming legs, first leg most
// significant; likewise for outputs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pseudoent {

enum class VertexKind { Unitary, InputProduct, InputBell, Output };

inline const char* to_string(VertexKind k) {
    switch (k) {
        case VertexKind::Unitary: return "unitary";
        case VertexKind::InputProduct: return "product";
        case VertexKind::InputBell: return "bell";
        case VertexKind::Output: return "output";
    }
    return "?";
}

inline VertexKind parse_vertex_kind(const std::string& s) {
    if (s == "unitary") return VertexKind::Unitary;
    if (s == "product") return VertexKind::InputProduct;
    if (s == "bell") return VertexKind::InputBell;
    if (s == "output") return VertexKind::Output;
    throw std::invalid_argument("unknown vertex kind '" + s + "'");
}

struct Vertex {
    int id = 0;
    VertexKind kind = VertexKind::Unitary;
};

struct Edge {
    int src = 0;
    int dst = 0;
    int chi = 2;
};

class TensorNetworkGraph {
public:
    int add_vertex(int id, VertexKind kind) {
        if (index_.count(id)) throw std::invalid_argument("duplicate vertex id " + std::to_string(id));
        index_[id] = static_cast<int>(vertices_.size());
        vertices_.push_back({id, kind});
        in_.emplace_back();
        out_.emplace_back();
        return id;
    }

    int add_edge(int src, int dst, int chi) {
        if (!index_.count(src) || !index_.count(dst))
            throw std::invalid_argument("edge " + std::to_string(src) + "->" + std::to_string(dst) + " references an unknown vertex");
        const int e = static_cast<int>(edges_.size());
        edges_.push_back({src, dst, chi});
        out_[index_.at(src)].push_back(e);
        in_[index_.at(dst)].push_back(e);
        return e;
    }

    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(int e) const { return edges_[e]; }
    bool has_vertex(int id) const { return index_.count(id) > 0; }
    int position(int id) const { return index_.at(id); }
    VertexKind kind(int id) const { return vertices_[index_.at(id)].kind; }
    const std::vector<int>& in_edges(int id) const { return in_[index_.at(id)]; }
    const std::vector<int>& out_edges(int id) const { return out_[index_.at(id)]; }

    std::vector<int> ids_of(VertexKind k) const {
        std::vector<int> r;
        for (const auto& v : vertices_)
            if (v.kind == k) r.push_back(v.id);
        std::sort(r.begin(), r.end());
        return r;
    }

    /// Output ids in ascending order; this is the order of output registers.
    std::vector<int> outputs() const { return ids_of(VertexKind::Output); }
    std::vector<int> unitaries() const { return ids_of(VertexKind::Unitary); }

    /// Product of incoming bond dimensions of a unitary.
    std::uint64_t gate_dim(int id) const {
        std::uint64_t d = 1;
        for (int e : in_edges(id)) d *= static_cast<std::uint64_t>(edges_[e].chi);
        return d;
    }

    /// Dimension of the single leg entering an output.
    int output_dim(int id) const { return edges_[in_edges(id).at(0)].chi; }

private:
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::map<int, int> index_;
    std::vector<std::vector<int>> in_;
    std::vector<std::vector<int>> out_;
};

struct Violation {
    int vertex = -1;  ///< -1 for graph-level problems
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string str() const {
        std::ostringstream os;
        for (const auto& v : violations) {
            if (v.vertex >= 0) os << "vertex " << v.vertex << ": ";
            os << v.message << '\n';
        }
        return os.str();
    }
};

inline ValidationReport validate(const TensorNetworkGraph& g) {
    ValidationReport r;
    auto fail = [&](int v, std::string msg) { r.violations.push_back({v, std::move(msg)}); };
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const auto& ed = g.edges()[e];
        if (ed.chi < 2) fail(ed.src, "edge to " + std::to_string(ed.dst) + " has bond dimension below 2");
    }
    for (const auto& v : g.vertices()) {
        const auto nin = g.in_edges(v.id).size();
        const auto nout = g.out_edges(v.id).size();
        switch (v.kind) {
            case VertexKind::InputProduct:
                if (nin != 0 || nout != 1) fail(v.id, "product input needs 0 incoming and 1 outgoing edge");
                break;
            case VertexKind::InputBell:
                if (nin != 0 || nout != 2) {
                    fail(v.id, "bell input needs 0 incoming and 2 outgoing edges");
                } else if (g.edge(g.out_edges(v.id)[0]).chi != g.edge(g.out_edges(v.id)[1]).chi) {
                    fail(v.id, "bell input legs have different bond dimensions");
                }
                break;
            case VertexKind::Output:
                if (nin != 1 || nout != 0) fail(v.id, "output needs 1 incoming and 0 outgoing edges");
                break;
            case VertexKind::Unitary: {
                if (nin == 0 || nout == 0) {
                    fail(v.id, "unitary needs incoming and outgoing edges");
                    break;
                }
                double lin = 0.0, lout = 0.0;
                for (int e : g.in_edges(v.id)) lin += std::log2(static_cast<double>(g.edge(e).chi));
                for (int e : g.out_edges(v.id)) lout += std::log2(static_cast<double>(g.edge(e).chi));
                if (std::abs(lin - lout) > 1e-9) fail(v.id, "unitary violates balance: product of incoming dims differs from outgoing");
                break;
            }
        }
    }
    if (g.vertices().empty()) {
        fail(-1, "graph is empty");
        return r;
    }
    // Connectivity (undirected).
    const int n = static_cast<int>(g.vertices().size());
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        const int p = stack.back();
        stack.pop_back();
        const int id = g.vertices()[p].id;
        for (const auto* list : {&g.in_edges(id), &g.out_edges(id)}) {
            for (int e : *list) {
                const int other = g.edge(e).src == id ? g.edge(e).dst : g.edge(e).src;
                const int q = g.position(other);
                if (!seen[q]) {
                    seen[q] = 1;
                    stack.push_back(q);
                }
            }
        }
    }
    if (std::count(seen.begin(), seen.end(), 1) != n) fail(-1, "graph is not connected");
    // Acyclicity.
    std::vector<int> indeg(n, 0);
    for (const auto& e : g.edges()) ++indeg[g.position(e.dst)];
    std::vector<int> ready;
    for (int p = 0; p < n; ++p)
        if (indeg[p] == 0) ready.push_back(p);
    int visited = 0;
    while (!ready.empty()) {
        const int p = ready.back();
        ready.pop_back();
        ++visited;
        for (int e : g.out_edges(g.vertices()[p].id))
            if (--indeg[g.position(g.edge(e).dst)] == 0) ready.push_back(g.position(g.edge(e).dst));
    }
    if (visited != n) fail(-1, "graph has a directed cycle");
    return r;
}

/// Unitary ids such that every edge runs forward. Inputs are released
/// first; among ready vertices the smallest id goes next.
inline std::vector<int> topological_order(const TensorNetworkGraph& g) {
    std::map<int, int> indeg;
    for (const auto& v : g.vertices()) indeg[v.id] = static_cast<int>(g.in_edges(v.id).size());
    using Key = std::pair<int, int>;  // (not an input, id)
    auto key = [&](int id) {
        const auto k = g.kind(id);
        return Key{k == VertexKind::InputProduct || k == VertexKind::InputBell ? 0 : 1, id};
    };
    std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
    for (const auto& [id, d] : indeg)
        if (d == 0) ready.push(key(id));
    std::vector<int> order;
    std::size_t visited = 0;
    while (!ready.empty()) {
        const int id = ready.top().second;
        ready.pop();
        ++visited;
        if (g.kind(id) == VertexKind::Unitary) order.push_back(id);
        for (int e : g.out_edges(id))
            if (--indeg[g.edge(e).dst] == 0) ready.push(key(g.edge(e).dst));
    }
    if (visited != g.vertices().size()) throw std::invalid_argument("topological_order: graph has a cycle");
    return order;
}

struct SystemShape {
    double D = 1.0;  ///< total output dimension
    double N = 0.0;  ///< log2 D
    int L = 0;       ///< output count
    int n_U = 0;     ///< unitary count
};

inline SystemShape system_shape(const TensorNetworkGraph& g) {
    SystemShape s;
    for (int o : g.outputs()) {
        s.D *= g.output_dim(o);
        s.N += std::log2(static_cast<double>(g.output_dim(o)));
        ++s.L;
    }
    s.n_U = static_cast<int>(g.unitaries().size());
    return s;
}

// ---------------------------------------------------------------- builders

/// Staircase MPS circuit of L gates on (nu + 1) qubits each.
///
/// Ids: outputs 1..L+nu in physical order, gates L+nu+1.., then inputs.
/// Gate j reads the bond register (2^nu) then a fresh qubit, and writes
/// physical qubit j then the bond register. Gate 1's bond register is a
/// product input; the last gate writes nu + 1 qubit outputs.
inline TensorNetworkGraph build_staircase(int L, int nu) {
    if (L < 1 || nu < 1) throw std::invalid_argument("build_staircase: need L >= 1 and nu >= 1");
    if (nu > 20) throw std::invalid_argument("build_staircase: nu too large");
    const int chi = 1 << nu;
    const int N = L + nu;
    TensorNetworkGraph g;
    for (int k = 1; k <= N; ++k) g.add_vertex(k, VertexKind::Output);
    auto gate = [&](int j) { return N + j; };
    for (int j = 1; j <= L; ++j) g.add_vertex(gate(j), VertexKind::Unitary);
    int next = N + L + 1;
    const int bond0 = g.add_vertex(next++, VertexKind::InputProduct);
    for (int j = 1; j <= L; ++j) {
        const int fresh = g.add_vertex(next++, VertexKind::InputProduct);
        g.add_edge(j == 1 ? bond0 : gate(j - 1), gate(j), chi);
        g.add_edge(fresh, gate(j), 2);
        g.add_edge(gate(j), j, 2);
        if (j == L)
            for (int k = L + 1; k <= N; ++k) g.add_edge(gate(j), k, 2);
    }
    return g;
}

/// Patch of the {6,4} hyperbolic tiling grown by ring inflation.
///
/// Every hexagon is a unitary with 3 incoming and 3 outgoing legs of
/// dimension chi. The centre hexagon takes Bell-fed legs on slots 0, 2, 4
/// and emits on slots 1, 3, 5. For ring k+1, every outward edge of a ring-k
/// hexagon gets an edge-type hexagon across it, and every hexagon vertex
/// between two consecutive outward edges of the same parent gets a
/// vertex-type hexagon (cyclically around the centre). Neighbours along a
/// ring share a Bell pair. Edge-type hexagons read their inward leg plus two
/// lateral Bell legs and emit 3 outward legs; vertex-type hexagons read two
/// lateral Bell legs plus a Bell-fed first outward edge and emit the other 3.
/// Outward legs of the last ring end in outputs, numbered 1.. in angular order.
inline TensorNetworkGraph build_hyperbolic_64(int layers, int chi) {
    if (layers < 1 || layers > 3) throw std::invalid_argument("build_hyperbolic_64: layers must be 1, 2 or 3");
    if (chi < 2) throw std::invalid_argument("build_hyperbolic_64: chi must be at least 2");

    // Built on provisional ids, renumbered at the end.
    std::vector<VertexKind> kinds;
    std::vector<std::pair<int, int>> edges;
    auto vertex = [&](VertexKind k) {
        kinds.push_back(k);
        return static_cast<int>(kinds.size()) - 1;
    };
    auto edge = [&](int a, int b) { edges.emplace_back(a, b); };

    struct Tile {
        int vertex;
        std::vector<int> stubs;  ///< vertices owing one outgoing leg across each outward edge
    };

    std::vector<Tile> ring;
    {
        const int c = vertex(VertexKind::Unitary);
        Tile t{c, {}};
        for (int slot = 0; slot < 6; ++slot) {
            if (slot % 2 == 0) {
                const int b = vertex(VertexKind::InputBell);
                edge(b, c);
                t.stubs.push_back(b);
            } else {
                t.stubs.push_back(c);
            }
        }
        ring.push_back(std::move(t));
    }
    for (int layer = 1; layer < layers; ++layer) {
        std::vector<Tile> next;
        std::vector<char> edge_type;
        for (const auto& parent : ring) {
            const std::size_t ns = parent.stubs.size();
            const bool cyclic = layer == 1;
            for (std::size_t i = 0; i < ns; ++i) {
                const int e = vertex(VertexKind::Unitary);
                edge(parent.stubs[i], e);
                next.push_back({e, {}});
                edge_type.push_back(1);
                if (i + 1 < ns || cyclic) {
                    next.push_back({vertex(VertexKind::Unitary), {}});
                    edge_type.push_back(0);
                }
            }
        }
        for (std::size_t k = 0; k < next.size(); ++k) {
            const int b = vertex(VertexKind::InputBell);
            edge(b, next[k].vertex);
            edge(b, next[(k + 1) % next.size()].vertex);
        }
        for (std::size_t k = 0; k < next.size(); ++k) {
            auto& t = next[k];
            if (!edge_type[k]) {
                const int b = vertex(VertexKind::InputBell);
                edge(b, t.vertex);
                t.stubs.push_back(b);
            }
            for (int s = 0; s < 3; ++s) t.stubs.push_back(t.vertex);
        }
        ring = std::move(next);
    }
    std::vector<int> outputs;
    for (const auto& t : ring) {
        for (int s : t.stubs) {
            const int o = vertex(VertexKind::Output);
            edge(s, o);
            outputs.push_back(o);
        }
    }

    // Outputs first (1..), then unitaries, then inputs, each in creation order.
    std::vector<int> newid(kinds.size(), 0);
    int next_id = 1;
    for (int o : outputs) newid[o] = next_id++;
    for (std::size_t v = 0; v < kinds.size(); ++v)
        if (kinds[v] == VertexKind::Unitary) newid[v] = next_id++;
    for (std::size_t v = 0; v < kinds.size(); ++v)
        if (kinds[v] == VertexKind::InputBell || kinds[v] == VertexKind::InputProduct) newid[v] = next_id++;
    std::vector<int> by_id(kinds.size());
    for (std::size_t v = 0; v < kinds.size(); ++v) by_id[newid[v] - 1] = static_cast<int>(v);
    TensorNetworkGraph g;
    for (int v : by_id) g.add_vertex(newid[v], kinds[v]);
    for (const auto& [a, b] : edges) g.add_edge(newid[a], newid[b], chi);
    return g;
}

// ----------------------------------------------------------------- min cut

struct CutResult {
    std::vector<int> region;     ///< A, sorted output ids
    std::vector<int> cut_edges;  ///< edge indices
    int weight_bits = 0;         ///< sum of log2 chi over cut edges
    int flow_bits = 0;           ///< max-flow value (certificate)
    int cardinality = 0;         ///< number of cut edges
};

namespace detail {

/// Dinic max-flow on an undirected integer-capacity graph.
class Dinic {
public:
    explicit Dinic(int n) : adj_(n), level_(n), it_(n) {}

    int add_edge(int a, int b, long long cap_ab, long long cap_ba) {
        adj_[a].push_back(static_cast<int>(arcs_.size()));
        arcs_.push_back({b, cap_ab});
        adj_[b].push_back(static_cast<int>(arcs_.size()));
        arcs_.push_back({a, cap_ba});
        return static_cast<int>(arcs_.size()) - 2;
    }

    long long max_flow(int s, int t) {
        long long flow = 0;
        while (bfs(s, t)) {
            std::fill(it_.begin(), it_.end(), 0);
            while (long long f = dfs(s, t, std::numeric_limits<long long>::max())) flow += f;
        }
        return flow;
    }

    /// Vertices reachable from s in the residual graph.
    std::vector<char> source_side(int s) const {
        std::vector<char> seen(adj_.size(), 0);
        std::vector<int> stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int a : adj_[v]) {
                if (arcs_[a].cap > 0 && !seen[arcs_[a].to]) {
                    seen[arcs_[a].to] = 1;
                    stack.push_back(arcs_[a].to);
                }
            }
        }
        return seen;
    }

private:
    struct Arc {
        int to;
        long long cap;
    };

    bool bfs(int s, int t) {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<int> q;
        level_[s] = 0;
        q.push(s);
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (int a : adj_[v]) {
                if (arcs_[a].cap > 0 && level_[arcs_[a].to] < 0) {
                    level_[arcs_[a].to] = level_[v] + 1;
                    q.push(arcs_[a].to);
                }
            }
        }
        return level_[t] >= 0;
    }

    long long dfs(int v, int t, long long f) {
        if (v == t) return f;
        for (int& i = it_[v]; i < static_cast<int>(adj_[v].size()); ++i) {
            Arc& arc = arcs_[adj_[v][i]];
            if (arc.cap <= 0 || level_[arc.to] != level_[v] + 1) continue;
            const long long got = dfs(arc.to, t, std::min(f, arc.cap));
            if (got > 0) {
                arc.cap -= got;
                arcs_[adj_[v][i] ^ 1].cap += got;
                return got;
            }
        }
        return 0;
    }

    std::vector<std::vector<int>> adj_;
    std::vector<Arc> arcs_;
    std::vector<int> level_;
    std::vector<int> it_;
};

inline int log2_exact(int chi) {
    if (chi < 2 || (chi & (chi - 1))) throw std::invalid_argument("min_cut: bond dimensions must be powers of two");
    int b = 0;
    while ((1 << b) < chi) ++b;
    return b;
}

}  // namespace detail

/// Minimum cut separating outputs in A from the other outputs, with
/// capacities log2 chi per edge and inputs free to fall on either side.
inline CutResult min_cut(const TensorNetworkGraph& g, std::vector<int> A) {
    std::sort(A.begin(), A.end());
    A.erase(std::unique(A.begin(), A.end()), A.end());
    const auto outs = g.outputs();
    for (int a : A)
        if (!g.has_vertex(a) || g.kind(a) != VertexKind::Output)
            throw std::invalid_argument("min_cut: " + std::to_string(a) + " is not an output");
    CutResult r;
    r.region = A;
    if (A.empty()) throw std::invalid_argument("min_cut: region is empty");
    if (A.size() == outs.size()) return r;

    const int n = static_cast<int>(g.vertices().size());
    const int S = n, T = n + 1;
    detail::Dinic flow(n + 2);
    constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
    std::vector<int> arc_of(g.edges().size());
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const auto& ed = g.edges()[e];
        const long long c = detail::log2_exact(ed.chi);
        arc_of[e] = flow.add_edge(g.position(ed.src), g.position(ed.dst), c, c);
    }
    for (int o : outs) {
        if (std::binary_search(A.begin(), A.end(), o)) {
            flow.add_edge(S, g.position(o), kInf, 0);
        } else {
            flow.add_edge(g.position(o), T, kInf, 0);
        }
    }
    r.flow_bits = static_cast<int>(flow.max_flow(S, T));
    const auto side = flow.source_side(S);
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const auto& ed = g.edges()[e];
        if (side[g.position(ed.src)] != side[g.position(ed.dst)]) {
            r.cut_edges.push_back(static_cast<int>(e));
            r.weight_bits += detail::log2_exact(ed.chi);
        }
    }
    r.cardinality = static_cast<int>(r.cut_edges.size());
    return r;
}

// ------------------------------------------------------------- text format

/// Lines: `vertex <id> <unitary|product|bell|output>` and
/// `edge <src> <dst> <chi>`; '#' starts a comment.
inline TensorNetworkGraph parse_graph(std::istream& in) {
    TensorNetworkGraph g;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        try {
            if (word == "vertex") {
                int id;
                std::string kind;
                if (!(ls >> id >> kind)) throw std::invalid_argument("expected 'vertex <id> <kind>'");
                g.add_vertex(id, parse_vertex_kind(kind));
            } else if (word == "edge") {
                int a, b, chi;
                if (!(ls >> a >> b >> chi)) throw std::invalid_argument("expected 'edge <src> <dst> <chi>'");
                g.add_edge(a, b, chi);
            } else {
                throw std::invalid_argument("unknown record '" + word + "'");
            }
            if (ls >> word) throw std::invalid_argument("trailing token '" + word + "'");
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("graph line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return g;
}

inline TensorNetworkGraph parse_graph(const std::string& text) {
    std::istringstream in(text);
    return parse_graph(in);
}

inline void write_graph(std::ostream& os, const TensorNetworkGraph& g) {
    for (const auto& v : g.vertices()) os << "vertex " << v.id << ' ' << to_string(v.kind) << '\n';
    for (const auto& e : g.edges()) os << "edge " << e.src << ' ' << e.dst << ' ' << e.chi << '\n';
}

inline std::string format_graph(const TensorNetworkGraph& g) {
    std::ostringstream os;
    write_graph(os, g);
    return os.str();
}

/// Comma-separated output ids, e.g. "1,2,5".
inline std::vector<int> parse_region(const std::string& s) {
    std::vector<int> r;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok.erase(0, tok.find_first_not_of(" \t"));
        tok.erase(tok.find_last_not_of(" \t") + 1);
        if (tok.empty()) throw std::invalid_argument("region: empty id");
        std::size_t used = 0;
        const int id = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument("region: bad id '" + tok + "'");
        r.push_back(id);
    }
    if (r.empty()) throw std::invalid_argument("region: no ids");
    return r;
}

}  // namespace pseudoent

#endif  // PSEUDOENT_TNGRAPH_HPP
