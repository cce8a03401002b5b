#pragma once

// Weighted DDI graph over interacting drugs: node metrics, gender-imbalance
// subgraphs, GraphML / edge-CSV export and edge-CSV ingestion.

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ddi/catalog.hpp"
#include "ddi/core.hpp"
#include "ddi/csv.hpp"
#include "ddi/measures.hpp"
#include "ddi/parallel.hpp"

namespace ddi {

struct IoFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class WeightKind { Tau, PatientCount };

struct DdiEdge {
    PairKey pair;
    double weight = 0;  // tau^Phi_ij or |U^Phi_ij| depending on WeightKind
    double tau = 0;
    long u_phi = 0;
    RiskValue rri_f;
    Severity severity = Severity::NotAvailable;
};

struct DdiNode {
    std::string drug;
    double pi = 0;
    std::string drug_class;
};

struct DdiGraph {
    WeightKind weight_kind = WeightKind::Tau;
    std::vector<DdiNode> nodes;  // sorted by drug id
    std::vector<DdiEdge> edges;  // sorted by pair

    int node_index(const std::string& drug) const {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), drug,
                                   [](const DdiNode& n, const std::string& d) {
                                       return n.drug < d;
                                   });
        if (it == nodes.end() || it->drug != drug) return -1;
        return static_cast<int>(it - nodes.begin());
    }
};

// Edges are exactly the catalog pairs observed with u_phi > 0.
inline DdiGraph build_graph(const std::vector<PairMeasures>& pairs,
                            const std::vector<DrugMeasures>& drugs,
                            WeightKind weight_kind = WeightKind::Tau) {
    DdiGraph graph;
    graph.weight_kind = weight_kind;
    std::map<std::string, double> pi_of;
    for (const auto& d : drugs) pi_of[d.drug] = d.pi;
    std::set<std::string> node_ids;
    for (const auto& pm : pairs) {
        if (!pm.severity || pm.u_phi <= 0) continue;
        DdiEdge e;
        e.pair = pm.pair;
        e.tau = pm.tau_phi;
        e.u_phi = pm.u_phi;
        e.weight = weight_kind == WeightKind::Tau ? pm.tau_phi
                                                  : static_cast<double>(pm.u_phi);
        e.rri_f = pm.rri_f;
        e.severity = *pm.severity;
        graph.edges.push_back(std::move(e));
        node_ids.insert(pm.pair.drug_lo);
        node_ids.insert(pm.pair.drug_hi);
    }
    for (const auto& id : node_ids) {
        DdiNode n;
        n.drug = id;
        if (auto it = pi_of.find(id); it != pi_of.end()) n.pi = it->second;
        graph.nodes.push_back(std::move(n));
    }
    std::sort(graph.edges.begin(), graph.edges.end(),
              [](const DdiEdge& a, const DdiEdge& b) { return a.pair < b.pair; });
    return graph;
}

struct NodeMetrics {
    std::string drug;
    int degree = 0;
    double strength = 0;     // sum of tau weights
    double betweenness = 0;  // unweighted, normalized by (n-1)(n-2)/2
};

// Betweenness on unweighted shortest paths (Brandes), parallel over source
// nodes with a fixed reduction order.
inline std::vector<NodeMetrics> node_metrics(const DdiGraph& graph, unsigned threads = 1) {
    const size_t n = graph.nodes.size();
    std::vector<NodeMetrics> metrics(n);
    for (size_t v = 0; v < n; ++v) metrics[v].drug = graph.nodes[v].drug;

    std::vector<std::vector<int>> adj(n);
    for (const auto& e : graph.edges) {
        int i = graph.node_index(e.pair.drug_lo);
        int j = graph.node_index(e.pair.drug_hi);
        adj[static_cast<size_t>(i)].push_back(j);
        adj[static_cast<size_t>(j)].push_back(i);
        metrics[static_cast<size_t>(i)].degree += 1;
        metrics[static_cast<size_t>(j)].degree += 1;
        metrics[static_cast<size_t>(i)].strength += e.tau;
        metrics[static_cast<size_t>(j)].strength += e.tau;
    }
    if (n < 3) return metrics;

    std::vector<std::vector<double>> partial(n, std::vector<double>(n, 0.0));
    parallel_for(n, threads, [&](size_t s) {
        std::vector<int> dist(n, -1);
        std::vector<double> sigma(n, 0.0), delta(n, 0.0);
        std::vector<std::vector<int>> pred(n);
        std::vector<int> order;
        order.reserve(n);
        std::deque<int> queue;
        dist[s] = 0;
        sigma[s] = 1;
        queue.push_back(static_cast<int>(s));
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            order.push_back(v);
            for (int w : adj[static_cast<size_t>(v)]) {
                if (dist[static_cast<size_t>(w)] < 0) {
                    dist[static_cast<size_t>(w)] = dist[static_cast<size_t>(v)] + 1;
                    queue.push_back(w);
                }
                if (dist[static_cast<size_t>(w)] == dist[static_cast<size_t>(v)] + 1) {
                    sigma[static_cast<size_t>(w)] += sigma[static_cast<size_t>(v)];
                    pred[static_cast<size_t>(w)].push_back(v);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            int w = *it;
            for (int v : pred[static_cast<size_t>(w)])
                delta[static_cast<size_t>(v)] += sigma[static_cast<size_t>(v)] /
                                                 sigma[static_cast<size_t>(w)] *
                                                 (1.0 + delta[static_cast<size_t>(w)]);
            if (static_cast<size_t>(w) != s)
                partial[s][static_cast<size_t>(w)] = delta[static_cast<size_t>(w)];
        }
    });
    double norm = static_cast<double>(n - 1) * static_cast<double>(n - 2);  // undirected: /2, pairs counted twice
    for (size_t v = 0; v < n; ++v) {
        double acc = 0;
        for (size_t s = 0; s < n; ++s) acc += partial[s][v];
        metrics[v].betweenness = acc / norm;
    }
    return metrics;
}

// Edges whose gender imbalance exceeds the threshold. For F: RRI^F > t
// (including +inf). For M: RRI^F < 1/t, including RRI^F = 0 (male-only).
inline DdiGraph gender_subgraph(const DdiGraph& graph, double threshold, Gender gender) {
    DdiGraph sub;
    sub.weight_kind = graph.weight_kind;
    std::set<std::string> node_ids;
    for (const auto& e : graph.edges) {
        bool keep = false;
        if (gender == Gender::F) {
            keep = e.rri_f.exceeds(threshold);
        } else if (e.rri_f.kind == RiskValue::Kind::Finite) {
            keep = e.rri_f.value < 1.0 / threshold;
        }
        if (!keep) continue;
        sub.edges.push_back(e);
        node_ids.insert(e.pair.drug_lo);
        node_ids.insert(e.pair.drug_hi);
    }
    for (const auto& id : node_ids) {
        DdiNode n;
        int idx = graph.node_index(id);
        if (idx >= 0) n = graph.nodes[static_cast<size_t>(idx)];
        else n.drug = id;
        sub.nodes.push_back(std::move(n));
    }
    return sub;
}

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

inline std::string fmt(double v, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

}  // namespace detail

// GraphML with node attributes (pi, class) and edge attributes (weight,
// rri_f, favored_gender, severity). Infinite RRI edges omit the numeric
// rri_f attribute and carry favored_gender=F.
inline void export_graphml(const DdiGraph& graph, std::ostream& out) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"d0\" for=\"node\" attr.name=\"pi\" attr.type=\"double\"/>\n"
        << "  <key id=\"d1\" for=\"node\" attr.name=\"class\" attr.type=\"string\"/>\n"
        << "  <key id=\"d2\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
        << "  <key id=\"d3\" for=\"edge\" attr.name=\"rri_f\" attr.type=\"double\"/>\n"
        << "  <key id=\"d4\" for=\"edge\" attr.name=\"favored_gender\" attr.type=\"string\"/>\n"
        << "  <key id=\"d5\" for=\"edge\" attr.name=\"severity\" attr.type=\"string\"/>\n"
        << "  <graph edgedefault=\"undirected\">\n";
    for (const auto& n : graph.nodes) {
        out << "    <node id=\"" << detail::xml_escape(n.drug) << "\">\n"
            << "      <data key=\"d0\">" << detail::fmt(n.pi) << "</data>\n";
        if (!n.drug_class.empty())
            out << "      <data key=\"d1\">" << detail::xml_escape(n.drug_class) << "</data>\n";
        out << "    </node>\n";
    }
    for (const auto& e : graph.edges) {
        out << "    <edge source=\"" << detail::xml_escape(e.pair.drug_lo) << "\" target=\""
            << detail::xml_escape(e.pair.drug_hi) << "\">\n"
            << "      <data key=\"d2\">" << detail::fmt(e.weight) << "</data>\n";
        if (e.rri_f.kind == RiskValue::Kind::Finite)
            out << "      <data key=\"d3\">" << detail::fmt(e.rri_f.value, 4) << "</data>\n";
        std::string favored = e.rri_f.is_inf() || (e.rri_f.is_finite() && e.rri_f.value > 1)
                                  ? "F"
                                  : (e.rri_f.is_finite() && e.rri_f.value < 1 ? "M" : "");
        if (!favored.empty())
            out << "      <data key=\"d4\">" << favored << "</data>\n";
        out << "      <data key=\"d5\">" << severity_label(e.severity) << "</data>\n"
            << "    </edge>\n";
    }
    out << "  </graph>\n</graphml>\n";
}

inline void export_edge_csv(const DdiGraph& graph, std::ostream& out) {
    csv::write_row(out, {"drug_i", "drug_j", "tau", "u_phi", "rri_f", "severity"});
    for (const auto& e : graph.edges)
        csv::write_row(out, {e.pair.drug_lo, e.pair.drug_hi, detail::fmt(e.tau, 4),
                             std::to_string(e.u_phi), e.rri_f.str(4), severity_label(e.severity)});
}

enum class GraphFormat { GraphML, EdgeCsv };

inline void export_graph(const DdiGraph& graph, GraphFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open " + path);
    if (format == GraphFormat::GraphML)
        export_graphml(graph, out);
    else
        export_edge_csv(graph, out);
    if (!out) throw IoFailure("write failed: " + path);
}

inline DdiGraph ingest_edge_csv(const std::vector<std::vector<std::string>>& rows,
                                WeightKind weight_kind = WeightKind::Tau) {
    if (rows.empty()) throw IoFailure("edge csv: no header");
    const auto& header = rows[0];
    auto col = [&](const char* name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw IoFailure(std::string("edge csv: missing column ") + name);
        return static_cast<size_t>(it - header.begin());
    };
    size_t ci = col("drug_i"), cj = col("drug_j"), ct = col("tau"), cu = col("u_phi"),
           cr = col("rri_f"), cs = col("severity");
    DdiGraph graph;
    graph.weight_kind = weight_kind;
    std::set<std::string> node_ids;
    for (size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        DdiEdge e;
        e.pair = PairKey(row[ci], row[cj]);
        e.tau = std::stod(row[ct]);
        e.u_phi = std::stol(row[cu]);
        e.weight = weight_kind == WeightKind::Tau ? e.tau : static_cast<double>(e.u_phi);
        if (row[cr] == "inf")
            e.rri_f = RiskValue::pos_inf();
        else if (row[cr] == "n/o" || row[cr].empty())
            e.rri_f = RiskValue::not_observed();
        else
            e.rri_f = RiskValue::finite(std::stod(row[cr]));
        e.severity = parse_severity(row[cs]);
        node_ids.insert(e.pair.drug_lo);
        node_ids.insert(e.pair.drug_hi);
        graph.edges.push_back(std::move(e));
    }
    for (const auto& id : node_ids) graph.nodes.push_back({id, 0.0, {}});
    std::sort(graph.edges.begin(), graph.edges.end(),
              [](const DdiEdge& a, const DdiEdge& b) { return a.pair < b.pair; });
    return graph;
}

inline DdiGraph ingest_edge_csv_file(const std::string& path,
                                     WeightKind weight_kind = WeightKind::Tau) {
    return ingest_edge_csv(csv::parse_file(path), weight_kind);
}

}  // namespace ddi
