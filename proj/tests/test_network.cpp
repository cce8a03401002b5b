#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "ddi/network.hpp"
#include "ddi/rng.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ddi;

namespace {

DdiGraph fixture_graph() {
    return ingest_edge_csv_file(fixtures::data_dir() + "/ddi_edges.csv");
}

PairMeasures pm(const char* a, const char* b, double tau, long uphi,
                std::optional<Severity> sev = Severity::Major) {
    PairMeasures p;
    p.pair = PairKey(a, b);
    p.tau_pop = tau;
    p.tau_phi = sev ? tau : 0;
    p.u_psi = uphi;
    p.u_phi = sev ? uphi : 0;
    p.severity = sev;
    p.rri_f = RiskValue::finite(1.0);
    return p;
}

}  // namespace

TEST_CASE("bundled edge list yields the published graph shape") {
    auto graph = fixture_graph();
    CHECK(graph.nodes.size() == 75);
    CHECK(graph.edges.size() == 181);
}

TEST_CASE("node metrics on the bundled fixture") {
    auto graph = fixture_graph();
    auto metrics = node_metrics(graph);
    bool found = false;
    for (const auto& nm : metrics)
        if (nm.drug == "Phenytoin") {
            found = true;
            CHECK(nm.degree == 24);
            CHECK(nm.strength == Catch::Approx(6.51).margin(0.02));
            CHECK(nm.betweenness == Catch::Approx(0.30).margin(0.05));
        }
    REQUIRE(found);

    long degree_sum = 0;
    for (const auto& nm : metrics) {
        degree_sum += nm.degree;
        CHECK(nm.strength <= nm.degree + 1e-9);  // each tau <= 1
    }
    CHECK(degree_sum == 2 * static_cast<long>(graph.edges.size()));
}

TEST_CASE("betweenness is thread-count independent") {
    auto graph = fixture_graph();
    auto seq = node_metrics(graph, 1);
    auto par = node_metrics(graph, 8);
    REQUIRE(seq.size() == par.size());
    for (size_t i = 0; i < seq.size(); ++i)
        CHECK(seq[i].betweenness == par[i].betweenness);
}

TEST_CASE("build_graph keeps only observed catalog pairs") {
    std::vector<PairMeasures> pairs = {pm("a", "b", 0.5, 10), pm("b", "c", 0.4, 5),
                                       pm("c", "d", 0.3, 2, std::nullopt)};
    std::vector<DrugMeasures> drugs = {{"a", 0.25, 100, 1, 4}};
    auto graph = build_graph(pairs, drugs, WeightKind::Tau);
    CHECK(graph.edges.size() == 2);
    CHECK(graph.nodes.size() == 3);
    CHECK(graph.nodes[0].drug == "a");
    CHECK(graph.nodes[0].pi == 0.25);
    CHECK(graph.edges[0].weight == 0.5);

    auto counts = build_graph(pairs, drugs, WeightKind::PatientCount);
    CHECK(counts.edges[0].weight == 10.0);

    CHECK(build_graph({}, {}).nodes.empty());
}

TEST_CASE("toy adjacency matches hand construction") {
    std::vector<PairMeasures> pairs = {pm("x", "y", 0.5, 3), pm("y", "z", 0.2, 2),
                                       pm("x", "z", 0.1, 1)};
    auto graph = build_graph(pairs, {});
    auto metrics = node_metrics(graph);
    for (const auto& nm : metrics) {
        CHECK(nm.degree == 2);  // triangle
        CHECK(nm.betweenness == 0.0);
    }
    auto it = std::find_if(metrics.begin(), metrics.end(),
                           [](const NodeMetrics& nm) { return nm.drug == "y"; });
    CHECK(it->strength == Catch::Approx(0.7));
}

TEST_CASE("betweenness matches brute force on random small graphs") {
    CounterRng rng(41);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 4 + static_cast<int>(rng.next_below(5));  // 4..8 nodes
        std::vector<std::pair<int, int>> edge_list;
        std::vector<PairMeasures> pairs;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.next_double() < 0.4) {
                    edge_list.emplace_back(i, j);
                    // names chosen so lexicographic order equals index order
                    std::string a = "n" + std::to_string(i), b = "n" + std::to_string(j);
                    pairs.push_back(pm(a.c_str(), b.c_str(), 0.5, 1));
                }
        if (edge_list.empty()) continue;
        auto graph = build_graph(pairs, {});
        auto metrics = node_metrics(graph);
        // brute force over the full node range [0, n); isolated nodes are
        // absent from the graph but contribute nothing
        auto brute = oracle::brute_betweenness(n, edge_list);
        // the engine normalizes by its own node count
        std::set<int> present;
        for (auto [a, b] : edge_list) {
            present.insert(a);
            present.insert(b);
        }
        int m = static_cast<int>(present.size());
        if (m < 3) continue;
        for (const auto& nm : metrics) {
            int idx = std::stoi(nm.drug.substr(1));
            double scale = ((n - 1) * (n - 2) / 2.0) / ((m - 1) * (m - 2) / 2.0);
            CHECK(nm.betweenness == Catch::Approx(brute[idx] * scale).margin(1e-9));
        }
    }
}

TEST_CASE("gender subgraphs on the bundled fixture") {
    auto graph = fixture_graph();
    auto female = gender_subgraph(graph, 3.0, Gender::F);
    CHECK(female.edges.size() == 65);
    CHECK(female.nodes.size() == 49);
    long major = 0;
    for (const auto& e : female.edges) major += e.severity == Severity::Major;
    CHECK(major == 16);

    auto male = gender_subgraph(graph, 3.0, Gender::M);
    CHECK(male.edges.size() == 9);
    CHECK(male.nodes.size() == 13);
}

TEST_CASE("threshold one covers all edges with defined risk") {
    auto graph = fixture_graph();
    auto female = gender_subgraph(graph, 1.0, Gender::F);
    auto male = gender_subgraph(graph, 1.0, Gender::M);
    size_t defined = 0, at_one = 0;
    for (const auto& e : graph.edges) {
        if (e.rri_f.kind == RiskValue::Kind::NotObserved) continue;
        defined += 1;
        at_one += e.rri_f.is_finite() && e.rri_f.value == 1.0;
    }
    CHECK(female.edges.size() + male.edges.size() + at_one == defined);

    // threshold below every finite value keeps the full female-leaning set
    auto low = gender_subgraph(graph, 1e-9, Gender::F);
    size_t above = 0;
    for (const auto& e : graph.edges) above += e.rri_f.exceeds(1e-9);
    CHECK(low.edges.size() == above);
}

TEST_CASE("edge csv round-trips the fixture graph") {
    auto graph = fixture_graph();
    std::ostringstream out;
    export_edge_csv(graph, out);
    auto back = ingest_edge_csv(csv::parse_string(out.str()));
    REQUIRE(back.edges.size() == graph.edges.size());
    REQUIRE(back.nodes.size() == graph.nodes.size());
    for (size_t i = 0; i < graph.edges.size(); ++i) {
        CHECK(back.edges[i].pair == graph.edges[i].pair);
        CHECK(back.edges[i].tau == graph.edges[i].tau);
        CHECK(back.edges[i].u_phi == graph.edges[i].u_phi);
        CHECK(back.edges[i].severity == graph.edges[i].severity);
        CHECK(back.edges[i].rri_f.kind == graph.edges[i].rri_f.kind);
    }
}

TEST_CASE("graphml export carries every edge and parses cleanly") {
    auto graph = fixture_graph();
    std::ostringstream out;
    export_graphml(graph, out);
    std::string xml = out.str();
    size_t count = 0, at = 0;
    while ((at = xml.find("<edge ", at)) != std::string::npos) {
        ++count;
        ++at;
    }
    CHECK(count == 181);
    size_t nodes = 0;
    at = 0;
    while ((at = xml.find("<node ", at)) != std::string::npos) {
        ++nodes;
        ++at;
    }
    CHECK(nodes == 75);
    // infinite edges omit the numeric attribute but mark favored gender
    CHECK(xml.find("favored_gender") != std::string::npos);

    std::ostringstream empty;
    export_graphml(DdiGraph{}, empty);
    CHECK(empty.str().find("<graphml") != std::string::npos);
}
