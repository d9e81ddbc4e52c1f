// Command-line entry point for the canton pipeline.
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cantons/dataset.hpp"
#include "cantons/error.hpp"
#include "cantons/experiments.hpp"
#include "cantons/service.hpp"

namespace fs = std::filesystem;
using namespace cantons;

namespace {

struct Common {
    std::string data;
    std::string geo;
    std::string out;
};

struct ConfigFlags {
    std::string repr = "BlocShares";
    std::string metric = "Euclidean";
    std::string algo = "SA";
    int k = 5;
    std::optional<std::uint64_t> seed;
    double alpha = 0.4, beta = 0.4, gamma = 0.2;
    std::optional<int> iterations;
};

// Thrown for bad flag values found after parsing; exits with status 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void add_data(CLI::App* cmd, Common& c, bool geo = true) {
    cmd->add_option("--data", c.data, "data directory")->required()->check(CLI::ExistingDirectory);
    if (geo) cmd->add_option("--geo", c.geo, "boundary GeoJSON (default: <data>/municipalities.geojson)")->check(CLI::ExistingFile);
}

void add_config(CLI::App* cmd, ConfigFlags& f, bool algo = true) {
    cmd->add_option("--repr", f.repr, "BlocShares | RawParty | PCA_5 | NMF_5");
    cmd->add_option("--metric", f.metric, "Euclidean | Cosine | JensenShannon");
    if (algo) cmd->add_option("--algo", f.algo, "SA | Agglomerative | Louvain | KMeans");
    cmd->add_option("--k", f.k, "number of cantons")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", f.seed, "seed (default: derived from the config)");
    cmd->add_option("--alpha", f.alpha, "homogeneity weight")->check(CLI::NonNegativeNumber);
    cmd->add_option("--beta", f.beta, "balance weight")->check(CLI::NonNegativeNumber);
    cmd->add_option("--gamma", f.gamma, "compactness weight")->check(CLI::NonNegativeNumber);
    cmd->add_option("--iterations", f.iterations, "SA iterations")->check(CLI::PositiveNumber);
}

std::optional<fs::path> geo_path(const Common& c) {
    if (c.geo.empty()) return std::nullopt;
    return fs::path(c.geo);
}

ExperimentConfig to_config(const ConfigFlags& f) {
    ExperimentConfig c;
    try {
        c = make_config(parse_representation(f.repr), parse_metric(f.metric), parse_algorithm(f.algo), f.k);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    if (f.seed) c.seed = *f.seed;
    if (!c.is_valid()) throw UsageError(c.key() + " is not a valid configuration (PCA_5 cannot use JensenShannon)");
    return c;
}

RunOptions to_options(const ConfigFlags& f) {
    RunOptions o;
    o.cost_weights = {f.alpha, f.beta, f.gamma};
    o.sa_iterations = f.iterations;
    return o;
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
}

int cmd_ingest(const Common& c) {
    const Dataset data = load_dataset(c.data, geo_path(c));
    std::printf("municipalities in all elections: %zu\n", data.panel.size());
    for (const auto& e : data.elections)
        std::printf("election %d (Knesset %d, %s): rows=%zu parties=%zu eligible=%lld actual=%lld\n", e.election_id,
                    e.knesset_number, e.date.c_str(), e.rows.size(), e.parties.size(),
                    static_cast<long long>(e.summed_eligible()), static_cast<long long>(e.summed_total()));
    std::printf("polygons: %zu\n", data.polygons.size());
    if (!c.out.empty()) {
        write_file(c.out, to_csv(bloc_shares_features(data.panel, data.mapping)));
        std::printf("wrote %s\n", c.out.c_str());
    }
    return 0;
}

int cmd_graph(const Common& c) {
    const Dataset data = load_dataset(c.data, geo_path(c));
    if (data.polygons.empty()) throw ValidationError("no boundary polygons: pass --geo or add municipalities.geojson");
    const PreparedGraph g = prepare_graph(data.panel, data.polygons, data.mapping);
    std::printf("polygons: %zu, boundary edges: %zu\n", g.adjacency.node_count(), g.adjacency.edge_count());
    std::printf("analysis subset: %zu nodes, %zu boundary edges, %zu components\n", g.subset.node_count(),
                g.subset.edge_count(), g.subset.component_count());
    std::printf("augmented: %zu edges (boundary %zu, virtual %zu, enclave %zu, bridge %zu), %zu components\n",
                g.augmented.edge_count(), g.augmented.count(EdgeKind::Boundary), g.augmented.count(EdgeKind::Virtual),
                g.augmented.count(EdgeKind::Enclave), g.augmented.count(EdgeKind::Bridge),
                g.augmented.component_count());
    if (!g.without_polygon.empty()) std::printf("without polygon: %zu\n", g.without_polygon.size());
    if (!g.without_votes.empty()) std::printf("geography only: %zu\n", g.without_votes.size());
    if (!c.out.empty()) {
        write_file(c.out, graph_to_json(g.augmented));
        std::printf("wrote %s\n", c.out.c_str());
    }
    return 0;
}

void write_partition(const fs::path& dir, const ExperimentResult& r, const Pipeline& p) {
    const PartitionExport ex = export_partition_geojson(r, p.data.polygons, *p.workspace);
    write_file(dir / ("partition_" + r.config.key() + ".geojson"), ex.geojson);
    write_file(dir / ("partition_" + r.config.key() + ".profiles.json"), ex.profiles);
}

int cmd_run(const Common& c, const ConfigFlags& f) {
    const ExperimentConfig config = to_config(f);
    const Pipeline p = load_pipeline(c.data, geo_path(c));
    const ExperimentResult r = run_config(config, *p.workspace, to_options(f));
    std::cout << kSummaryHeader << '\n' << summary_row(r) << '\n';
    if (!r.ok) std::fprintf(stderr, "failed: %s\n", r.failure.c_str());
    if (!c.out.empty()) {
        write_file(fs::path(c.out) / ("result_" + config.key() + ".json"), result_to_json(r) + "\n");
        if (r.ok) write_partition(c.out, r, p);
    }
    return r.ok ? 0 : 1;
}

int cmd_grid(const Common& c, const ConfigFlags& f, int parallelism, std::optional<int> only_k) {
    const Pipeline p = load_pipeline(c.data, geo_path(c));
    GridOptions options;
    options.out_dir = c.out;
    options.parallelism = parallelism;
    options.run = to_options(f);
    if (only_k) {
        for (const auto& cfg : enumerate_grid())
            if (cfg.k == *only_k) options.configs.push_back(cfg);
        if (options.configs.empty()) throw UsageError("--only-k must be one of 3, 5, 7, 10, 15, 20");
    }
    const auto results = run_grid(*p.workspace, options);
    std::size_t failed = 0;
    for (const auto& r : results) failed += r.ok ? 0 : 1;
    std::printf("%zu configurations, %zu failed; results in %s\n", results.size(), failed, c.out.c_str());
    return failed == 0 ? 0 : 1;
}

int cmd_stability(const Common& c, const std::string& preset, const ConfigFlags& f) {
    std::vector<StabilityConfig> configs;
    try {
        configs = stability_preset(preset);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    const Pipeline p = load_pipeline(c.data, geo_path(c));
    const auto panels = split_elections(p.workspace->panel());
    nlohmann::json all = nlohmann::json::array();
    std::printf("%-12s %-14s %-14s %8s %8s %8s %8s\n", "repr", "metric", "algorithm", "ARI", "ARI sd", "NMI", "NMI sd");
    for (const auto& sc : configs) {
        const StabilityRun run = stability_analysis(sc, panels, p.workspace->graph(), p.data.mapping, to_options(f));
        std::printf("%-12s %-14s %-14s %8.3f %8.3f %8.3f %8.3f\n", std::string(to_string(sc.representation)).c_str(),
                    std::string(to_string(sc.metric)).c_str(), std::string(to_string(sc.algorithm)).c_str(),
                    run.report.mean_ari, run.report.std_ari, run.report.mean_nmi, run.report.std_nmi);
        all.push_back(nlohmann::json::parse(stability_to_json(run)));
    }
    if (!c.out.empty()) write_file(c.out, all.dump(2) + "\n");
    return 0;
}

int cmd_sweep(const Common& c, ConfigFlags f, int seeds) {
    f.algo = "SA";
    const ExperimentConfig config = to_config(f);
    const Pipeline p = load_pipeline(c.data, geo_path(c));
    const int iterations = f.iterations.value_or(50000);
    const SweepSummary s = sa_seed_sweep(config, *p.workspace, seeds, iterations, {f.alpha, f.beta, f.gamma});
    std::printf("%s: %d seeds x %d iterations\n", config.key().c_str(), s.n_seeds, s.iterations);
    std::printf("silhouette mean %.4f std %.4f min %.4f max %.4f\n", s.silhouette.mean, s.silhouette.std,
                s.silhouette.min, s.silhouette.max);
    std::printf("pop_cv     mean %.4f std %.4f min %.4f max %.4f\n", s.population_cv.mean, s.population_cv.std,
                s.population_cv.min, s.population_cv.max);
    return 0;
}

int cmd_export(const Common& c, const ConfigFlags& f, const std::string& results_dir) {
    const ExperimentConfig config = to_config(f);
    const Pipeline p = load_pipeline(c.data, geo_path(c));
    std::optional<ExperimentResult> found;
    if (!results_dir.empty()) {
        std::ifstream in(fs::path(results_dir) / "results.jsonl");
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            ExperimentResult r = result_from_json(line);
            if (r.ok && r.config.key() == config.key()) found = std::move(r);
        }
        if (!found) throw ValidationError("no successful result for " + config.key() + " in " + results_dir);
    } else {
        found = run_config(config, *p.workspace, to_options(f));
        if (!found->ok) throw DomainError(found->failure);
    }
    const fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
    write_partition(dir, *found, p);
    std::printf("wrote %s\n", (dir / ("partition_" + config.key() + ".geojson")).string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Politically coherent, contiguous cantons from municipal election results"};
    app.require_subcommand(1);

    Common common;
    ConfigFlags flags;
    int parallelism = 1, seeds = 30, port = 8080, workers = 2;
    std::optional<int> only_k;
    std::string preset = "table7", results_dir, host = "127.0.0.1";

    auto* ingest = app.add_subcommand("ingest", "parse and align the election files");
    add_data(ingest, common);
    ingest->add_option("--out", common.out, "write BlocShares features as CSV");

    auto* graph = app.add_subcommand("graph", "build and augment the contiguity graph");
    add_data(graph, common);
    graph->add_option("--out", common.out, "write the augmented graph as JSON");

    auto* run = app.add_subcommand("run", "run one configuration");
    add_data(run, common);
    add_config(run, flags);
    run->add_option("--out", common.out, "directory for the result and partition GeoJSON");

    auto* grid = app.add_subcommand("grid", "run the full configuration grid");
    add_data(grid, common);
    add_config(grid, flags, false);
    grid->add_option("--out", common.out, "results directory")->required();
    grid->add_option("--parallelism", parallelism, "worker threads")->check(CLI::PositiveNumber);
    grid->add_option("--only-k", only_k, "restrict to one K");

    auto* stability = app.add_subcommand("stability", "cross-election stability suite");
    add_data(stability, common);
    stability->add_option("--preset", preset, "configuration preset");
    stability->add_option("--iterations", flags.iterations, "SA iterations")->check(CLI::PositiveNumber);
    stability->add_option("--out", common.out, "write reports as JSON");

    auto* sweep = app.add_subcommand("sweep", "SA seed sensitivity");
    add_data(sweep, common);
    add_config(sweep, flags, false);
    sweep->add_option("--seeds", seeds, "number of seeds")->check(CLI::PositiveNumber);

    auto* exp = app.add_subcommand("export", "write a partition as GeoJSON plus canton profiles");
    add_data(exp, common);
    add_config(exp, flags);
    exp->add_option("--results", results_dir, "reuse a grid result from this directory")->check(CLI::ExistingDirectory);
    exp->add_option("--out", common.out, "output directory");

    auto* serve = app.add_subcommand("serve", "HTTP API for the web UI");
    add_data(serve, common);
    serve->add_option("--results", results_dir, "grid results directory")->check(CLI::ExistingDirectory);
    serve->add_option("--port", port, "port")->check(CLI::Range(0, 65535));
    serve->add_option("--host", host, "bind address");
    serve->add_option("--workers", workers, "what-if worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*ingest) return cmd_ingest(common);
        if (*graph) return cmd_graph(common);
        if (*run) return cmd_run(common, flags);
        if (*grid) return cmd_grid(common, flags, parallelism, only_k);
        if (*stability) return cmd_stability(common, preset, flags);
        if (*sweep) return cmd_sweep(common, flags, seeds);
        if (*exp) return cmd_export(common, flags, results_dir);
        if (*serve) {
            ServiceOptions options;
            options.data_dir = common.data;
            options.geo = geo_path(common);
            if (!results_dir.empty()) options.results_dir = results_dir;
            options.workers = workers;
            Service service(options);
            const int bound = service.bind(host, port);
            if (bound < 0) throw ValidationError("cannot bind " + host + ":" + std::to_string(port));
            std::printf("listening on http://%s:%d\n", host.c_str(), bound);
            std::fflush(stdout);
            service.listen();
            return 0;
        }
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const MissingFileError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
