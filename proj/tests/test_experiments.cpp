#include <doctest.h>

#include <fstream>
#include <json.hpp>
#include <set>

#include "cantons/error.hpp"
#include "cantons/experiments.hpp"
#include "cantons/fixtures.hpp"
#include "helpers.hpp"

using namespace cantons;
using nlohmann::json;

namespace {

const Pipeline& fixture() {
    static const Pipeline p = load_pipeline(testing::fixture_dir());
    return p;
}

std::vector<std::string> lines_of(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("grid enumeration") {
    const auto grid = enumerate_grid();
    CHECK(grid.size() == 264);
    CHECK(excluded_grid_count() == 24);
    std::set<std::string> keys;
    std::map<int, int> per_k;
    for (const auto& c : grid) {
        CHECK(c.is_valid());
        CHECK_FALSE((c.representation == Representation::PCA5 && c.metric == Metric::JensenShannon));
        keys.insert(c.key());
        ++per_k[c.k];
        CHECK(c.seed == derive_seed(c.representation, c.metric, c.algorithm, c.k));
    }
    CHECK(keys.size() == 264);
    for (int k : kGridK) CHECK(per_k[k] == 44);
    CHECK(grid.front().key() == "BlocShares_Euclidean_SA_K3");
    CHECK(make_config(Representation::NMF5, Metric::Cosine, Algorithm::Louvain, 7).key() == "NMF_5_Cosine_Louvain_K7");
    CHECK_FALSE(make_config(Representation::PCA5, Metric::JensenShannon, Algorithm::SA, 5).is_valid());
}

TEST_CASE("algorithm names") {
    CHECK(parse_algorithm("SA") == Algorithm::SA);
    CHECK(parse_algorithm("agglo") == Algorithm::Agglomerative);
    CHECK(parse_algorithm("Louvain") == Algorithm::Louvain);
    CHECK(parse_algorithm("k-means") == Algorithm::KMeans);
    CHECK(to_string(Algorithm::KMeans) == "KMeans");
    CHECK_THROWS(parse_algorithm("spectral"));
}

TEST_CASE("workspace shares one graph and feature set") {
    const auto& ws = *fixture().workspace;
    CHECK(ws.graph().node_count() == 229);
    CHECK(ws.graph().is_connected());
    CHECK(ws.graph().nodes() == ws.panel().municipality_ids);
    CHECK(ws.standardized(Representation::BlocShares).standardized);
    CHECK(ws.distances(Representation::NMF5, Metric::JensenShannon).size() == 229);
    CHECK_THROWS_AS(ws.distances(Representation::PCA5, Metric::JensenShannon), DomainError);
}

TEST_CASE("every algorithm runs on the fixture") {
    for (auto algo : {Algorithm::SA, Algorithm::Agglomerative, Algorithm::Louvain, Algorithm::KMeans}) {
        const auto c = make_config(Representation::BlocShares, Metric::Euclidean, algo, 5);
        RunOptions opt;
        opt.sa_iterations = 2000;
        const auto r = run_config(c, *fixture().workspace, opt);
        REQUIRE(r.ok);
        CHECK(r.partition.size() == 229);
        CHECK(std::abs(r.partition.achieved_k - 5) <= 1);
        if (algo != Algorithm::KMeans) CHECK(r.report.disconnected_cantons == 0);
        CHECK(r.runtime_s >= 0.0);
        CHECK(r.municipality_ids == fixture().workspace->panel().municipality_ids);
    }
}

TEST_CASE("invalid configurations fail without throwing") {
    const auto r = run_config(make_config(Representation::PCA5, Metric::JensenShannon, Algorithm::SA, 5),
                              *fixture().workspace);
    CHECK_FALSE(r.ok);
    CHECK_FALSE(r.failure.empty());
    const auto too_many = run_config(make_config(Representation::BlocShares, Metric::Euclidean, Algorithm::SA, 500),
                                     *fixture().workspace);
    CHECK_FALSE(too_many.ok);
}

TEST_CASE("result JSON round trip") {
    RunOptions opt;
    opt.sa_iterations = 1000;
    const auto ok = run_config(make_config(Representation::RawParty, Metric::Cosine, Algorithm::SA, 3),
                               *fixture().workspace, opt);
    const auto line = result_to_json(ok);
    CHECK(line.find('\n') == std::string::npos);
    CHECK(result_from_json(line) == ok);
    const auto j = json::parse(line);
    CHECK(j["status"] == "ok");
    CHECK(j["config"]["K"] == 3);
    CHECK(j["assignment"].size() == 229);
    CHECK(j["reason"].is_null());

    const auto bad = run_config(make_config(Representation::PCA5, Metric::JensenShannon, Algorithm::KMeans, 3),
                                *fixture().workspace);
    const auto back = result_from_json(result_to_json(bad));
    CHECK(back == bad);
    CHECK(json::parse(result_to_json(bad))["metrics"].is_null());
    CHECK_THROWS_AS(result_from_json("{not json"), ParseError);
}

TEST_CASE("grid runs persist, resume and summarize") {
    const auto dir = testing::temp_dir("grid_resume");
    GridOptions opt;
    opt.out_dir = dir;
    opt.run.sa_iterations = 500;
    opt.configs = {make_config(Representation::BlocShares, Metric::Euclidean, Algorithm::KMeans, 3),
                   make_config(Representation::BlocShares, Metric::Cosine, Algorithm::Agglomerative, 3),
                   make_config(Representation::PCA5, Metric::JensenShannon, Algorithm::SA, 3)};
    const auto first = run_grid(*fixture().workspace, opt);
    CHECK(lines_of(dir / "results.jsonl").size() == 3);
    const auto summary = lines_of(dir / "summary.csv");
    REQUIRE(summary.size() == 4);
    CHECK(summary[0] == kSummaryHeader);
    CHECK(summary[1].rfind("BlocShares,Euclidean,KMeans,3,", 0) == 0);
    CHECK(summary[3].find(",failed") != std::string::npos);

    // Only the failed config is redone.
    const auto second = run_grid(*fixture().workspace, opt);
    CHECK(lines_of(dir / "results.jsonl").size() == 4);
    CHECK(second[0] == first[0]);
    CHECK(second[1] == first[1]);

    // A torn trailing line is tolerated.
    {
        std::ofstream out(dir / "results.jsonl", std::ios::app);
        out << "{\"config\":";
    }
    opt.configs.push_back(make_config(Representation::NMF5, Metric::Euclidean, Algorithm::Louvain, 3));
    const auto third = run_grid(*fixture().workspace, opt);
    CHECK(third.size() == 4);
    CHECK(third[3].ok);
}

TEST_CASE("grid output does not depend on parallelism") {
    GridOptions a;
    a.run.sa_iterations = 300;
    for (const auto& c : enumerate_grid())
        if (c.k == 3 && c.representation == Representation::BlocShares) a.configs.push_back(c);
    GridOptions b = a;
    b.parallelism = 4;
    const auto ra = run_grid(*fixture().workspace, a);
    const auto rb = run_grid(*fixture().workspace, b);
    REQUIRE(ra.size() == rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) {
        CHECK(ra[i].config == rb[i].config);
        CHECK(ra[i].partition == rb[i].partition);
    }
}

TEST_CASE("stability preset and analysis") {
    const auto preset = stability_preset("table7");
    REQUIRE(preset.size() == 6);
    CHECK(preset[0].algorithm == Algorithm::Louvain);
    CHECK(preset[5].representation == Representation::PCA5);
    for (const auto& c : preset) CHECK(c.k == 5);
    CHECK_THROWS(stability_preset("nope"));

    const auto per = split_elections(fixture().workspace->panel());
    REQUIRE(per.size() == 5);
    for (const auto& p : per) {
        CHECK(p.election_ids.size() == 1);
        CHECK(p.size() == 229);
    }
    const auto run = stability_analysis(preset[1], per, fixture().workspace->graph(), fixture().data.mapping);
    CHECK(run.partitions.size() == 5);
    CHECK(run.report.pairwise_ari.rows() == 5);
    CHECK(run.report.mean_ari <= 1.0);
    const auto j = json::parse(stability_to_json(run));
    CHECK(j.contains("mean_ari"));
}

TEST_CASE("seed sweep") {
    const auto c = make_config(Representation::BlocShares, Metric::Euclidean, Algorithm::SA, 5);
    const auto one = sa_seed_sweep(c, *fixture().workspace, 1, 500);
    CHECK(one.n_seeds == 1);
    CHECK(one.silhouette.std == 0.0);
    CHECK(one.population_cv.std == 0.0);
    CHECK(one.silhouette.min == one.silhouette.max);
    const auto three = sa_seed_sweep(c, *fixture().workspace, 3, 500);
    CHECK(three.silhouette.min <= three.silhouette.mean);
    CHECK(three.silhouette.mean <= three.silhouette.max);

    const auto m = moments({1.0, 2.0, 3.0, 4.0});
    CHECK(m.mean == 2.5);
    CHECK(m.std == doctest::Approx(std::sqrt(1.25)));
    CHECK(m.min == 1.0);
    CHECK(m.max == 4.0);
}

TEST_CASE("canton profiles") {
    const auto p = Partition::from_labels(std::vector<int>{0, 0, 1}, 2);
    const std::vector<BlocVector> shares{{1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}, {0, 0, 0, 0, 1}};
    const std::vector<double> w{10, 20, 5};
    const auto prof = canton_profiles(p, shares, w);
    REQUIRE(prof.size() == 2);
    CHECK(prof[0].municipalities == 2);
    CHECK(prof[0].mean_share_pct[0] == doctest::Approx(50.0));
    CHECK(prof[0].voters == 30.0);
    CHECK(prof[1].mean_share_pct[4] == doctest::Approx(100.0));
}

TEST_CASE("partition export") {
    const auto r = run_config(make_config(Representation::BlocShares, Metric::Euclidean, Algorithm::Agglomerative, 5),
                              *fixture().workspace);
    REQUIRE(r.ok);
    const auto out = export_partition_geojson(r, fixture().data.polygons, *fixture().workspace);
    const auto g = json::parse(out.geojson);
    CHECK(g["type"] == "FeatureCollection");
    REQUIRE(g["features"].size() == 229);
    const auto& f0 = g["features"][0];
    CHECK(f0["geometry"]["type"] == "MultiPolygon");
    CHECK(f0["properties"].contains("canton"));
    CHECK(f0["properties"]["bloc_means"].size() == 5);
    const auto side = json::parse(out.profiles);
    CHECK(side["cantons"].size() == static_cast<std::size_t>(r.partition.achieved_k));
    int total = 0;
    for (const auto& c : side["cantons"]) total += c["municipalities"].get<int>();
    CHECK(total == 229);

    std::vector<BoundaryPolygon> fewer(fixture().data.polygons.begin() + 3, fixture().data.polygons.end());
    CHECK_THROWS_AS(export_partition_geojson(r, fewer, *fixture().workspace), ValidationError);
}

TEST_CASE("load_pipeline needs geography") {
    const auto dir = testing::temp_dir("no_geo");
    auto files = synthetic_fixture();
    files.erase("municipalities.geojson");
    write_fixture(files, dir);
    CHECK_THROWS_AS(load_pipeline(dir), ValidationError);
}
