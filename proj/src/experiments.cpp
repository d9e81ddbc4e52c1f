#include "cantons/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cantons/error.hpp"

namespace cantons {

using ojson = nlohmann::ordered_json;

namespace {

constexpr std::array<Representation, 4> kRepresentations{Representation::BlocShares, Representation::RawParty,
                                                         Representation::PCA5, Representation::NMF5};
constexpr std::array<Metric, 3> kMetrics{Metric::Euclidean, Metric::Cosine, Metric::JensenShannon};
constexpr std::array<Algorithm, 4> kAlgorithms{Algorithm::SA, Algorithm::Agglomerative, Algorithm::Louvain,
                                               Algorithm::KMeans};

bool valid_pair(Representation rep, Metric metric) {
    return !(rep == Representation::PCA5 && metric == Metric::JensenShannon);
}

std::string lower(std::string_view text) {
    std::string out(text);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string format_double(double value, const char* fmt = "%.6f") {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, value);
    return buf;
}

ojson optional_number(const std::optional<double>& value) {
    return value ? ojson(*value) : ojson(nullptr);
}

ojson config_json(const ExperimentConfig& c) {
    ojson j;
    j["repr"] = std::string(to_string(c.representation));
    j["metric"] = std::string(to_string(c.metric));
    j["algorithm"] = std::string(to_string(c.algorithm));
    j["K"] = c.k;
    j["seed"] = c.seed;
    return j;
}

ojson report_json(const EvaluationReport& r) {
    ojson j;
    j["silhouette"] = optional_number(r.silhouette);
    j["wcss"] = r.wcss;
    j["pop_cv"] = r.population_cv;
    j["disconnected"] = r.disconnected_cantons;
    j["cost"] = {{"homogeneity", r.cost.homogeneity},
                 {"balance", r.cost.balance},
                 {"compactness", r.cost.compactness},
                 {"total", r.cost.total}};
    return j;
}

std::vector<double> voter_weights(const Workspace& ws) { return ws.panel().voter_weight; }

}  // namespace

std::string_view to_string(Algorithm algo) {
    switch (algo) {
        case Algorithm::SA: return "SA";
        case Algorithm::Agglomerative: return "Agglomerative";
        case Algorithm::Louvain: return "Louvain";
        case Algorithm::KMeans: return "KMeans";
    }
    return "SA";
}

Algorithm parse_algorithm(std::string_view text) {
    const std::string t = lower(text);
    if (t == "sa" || t == "annealing") return Algorithm::SA;
    if (t == "agglomerative" || t == "agglo" || t == "agg") return Algorithm::Agglomerative;
    if (t == "louvain") return Algorithm::Louvain;
    if (t == "kmeans" || t == "k-means") return Algorithm::KMeans;
    throw DomainError("unknown algorithm '" + std::string(text) + "'");
}

bool ExperimentConfig::is_valid() const { return valid_pair(representation, metric) && k >= 1; }

std::string ExperimentConfig::key() const {
    return std::string(to_string(representation)) + "_" + std::string(to_string(metric)) + "_" +
           std::string(to_string(algorithm)) + "_K" + std::to_string(k);
}

std::uint64_t derive_seed(Representation rep, Metric metric, Algorithm algo, int k) {
    ExperimentConfig c{rep, metric, algo, k, 0};
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : c.key()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ExperimentConfig make_config(Representation rep, Metric metric, Algorithm algo, int k) {
    return {rep, metric, algo, k, derive_seed(rep, metric, algo, k)};
}

std::vector<ExperimentConfig> enumerate_grid() {
    std::vector<ExperimentConfig> grid;
    for (auto rep : kRepresentations)
        for (auto metric : kMetrics) {
            if (!valid_pair(rep, metric)) continue;
            for (auto algo : kAlgorithms)
                for (int k : kGridK) grid.push_back(make_config(rep, metric, algo, k));
        }
    return grid;
}

std::size_t excluded_grid_count() {
    std::size_t excluded = 0;
    for (auto rep : kRepresentations)
        for (auto metric : kMetrics)
            if (!valid_pair(rep, metric)) excluded += kAlgorithms.size() * kGridK.size();
    return excluded;
}

// ---------------------------------------------------------------------------
// Workspace

Workspace::Workspace(AlignedPanel panel, BlocMapping mapping, const ContiguityGraph& graph, std::uint64_t nmf_seed)
    : panel_(std::move(panel)), mapping_(std::move(mapping)) {
    if (panel_.size() == 0) throw ValidationError("empty panel");
    graph_ = graph.nodes() == panel_.municipality_ids ? graph : subset_graph(graph, panel_.municipality_ids);
    if (graph_.node_count() != panel_.size()) throw GraphError("graph does not cover the panel");
    bloc_shares_ = mean_bloc_shares(panel_, mapping_);

    for (auto rep : kRepresentations) {
        try {
            FeatureMatrix raw = build_representation(rep, panel_, mapping_, nmf_seed);
            standardized_.emplace(rep, standardize(raw));
            raw_.emplace(rep, std::move(raw));
        } catch (const Error& e) {
            representation_errors_.emplace(rep, e.what());
            continue;
        }
        for (auto metric : kMetrics) {
            const auto key = std::make_pair(rep, metric);
            if (!valid_pair(rep, metric)) {
                distance_errors_.emplace(key, std::string(to_string(rep)) + " x " + std::string(to_string(metric)) +
                                                  " is excluded: the representation has negative values");
                continue;
            }
            try {
                const FeatureMatrix& source =
                    metric == Metric::JensenShannon ? raw_.at(rep) : standardized_.at(rep);
                distances_.emplace(key, pairwise_matrix(metric, source));
            } catch (const Error& e) {
                distance_errors_.emplace(key, e.what());
            }
        }
    }
}

const FeatureMatrix& Workspace::raw(Representation rep) const {
    if (const auto it = representation_errors_.find(rep); it != representation_errors_.end())
        throw DomainError(it->second);
    return raw_.at(rep);
}

const FeatureMatrix& Workspace::standardized(Representation rep) const {
    if (const auto it = representation_errors_.find(rep); it != representation_errors_.end())
        throw DomainError(it->second);
    return standardized_.at(rep);
}

const DistanceMatrix& Workspace::distances(Representation rep, Metric metric) const {
    if (const auto it = representation_errors_.find(rep); it != representation_errors_.end())
        throw DomainError(it->second);
    const auto key = std::make_pair(rep, metric);
    if (const auto it = distance_errors_.find(key); it != distance_errors_.end()) throw DomainError(it->second);
    return distances_.at(key);
}

// ---------------------------------------------------------------------------
// Single runs

Partition partition_for(const ExperimentConfig& config, const Workspace& ws, const RunOptions& options) {
    const FeatureMatrix& features = ws.standardized(config.representation);
    const DistanceMatrix& dm = ws.distances(config.representation, config.metric);
    switch (config.algorithm) {
        case Algorithm::SA: {
            SAParams params;
            params.seed = config.seed;
            params.cost_weights = options.cost_weights;
            if (options.sa_iterations) params.iterations = *options.sa_iterations;
            const auto weights = voter_weights(ws);
            return sa_partition(ws.graph(), features.values, weights, ws.bloc_shares(), config.k, params);
        }
        case Algorithm::Agglomerative: return agglomerative_partition(ws.graph(), dm, config.k);
        case Algorithm::Louvain: {
            LouvainParams params;
            params.seed = config.seed;
            return louvain_partition(edge_similarity_weights(ws.graph(), dm), config.k, params);
        }
        case Algorithm::KMeans: {
            KMeansParams params;
            params.seed = config.seed;
            return kmeans_partition(features.values, config.k, params);
        }
    }
    throw DomainError("unknown algorithm");
}

ExperimentResult run_config(const ExperimentConfig& config, const Workspace& ws, const RunOptions& options) {
    ExperimentResult result;
    result.config = config;
    result.municipality_ids = ws.panel().municipality_ids;
    const auto start = std::chrono::steady_clock::now();
    try {
        result.partition = partition_for(config, ws, options);
        const auto weights = voter_weights(ws);
        result.report = evaluate(result.partition, ws.standardized(config.representation).values,
                                 ws.distances(config.representation, config.metric), weights, ws.graph(),
                                 options.cost_weights);
        result.ok = true;
    } catch (const std::exception& e) {
        result.ok = false;
        result.failure = e.what();
        result.partition = {};
        result.report = {};
    }
    result.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

bool ExperimentResult::operator==(const ExperimentResult& o) const {
    const auto& a = report;
    const auto& b = o.report;
    return config == o.config && municipality_ids == o.municipality_ids && partition == o.partition &&
           a.silhouette == b.silhouette && a.wcss == b.wcss && a.population_cv == b.population_cv &&
           a.disconnected_cantons == b.disconnected_cantons && a.cost.homogeneity == b.cost.homogeneity &&
           a.cost.balance == b.cost.balance && a.cost.compactness == b.cost.compactness &&
           a.cost.total == b.cost.total && runtime_s == o.runtime_s && ok == o.ok && failure == o.failure;
}

std::string result_to_json(const ExperimentResult& r) {
    ojson j;
    j["config"] = config_json(r.config);
    ojson assignment = ojson::object();
    if (r.ok)
        for (std::size_t i = 0; i < r.municipality_ids.size(); ++i) assignment[r.municipality_ids[i]] = r.partition.labels[i];
    j["assignment"] = std::move(assignment);
    if (!r.ok) j["municipalities"] = r.municipality_ids;
    j["achieved_K"] = r.partition.achieved_k;
    j["metrics"] = r.ok ? report_json(r.report) : ojson(nullptr);
    j["runtime_s"] = r.runtime_s;
    j["status"] = r.ok ? "ok" : "failed";
    j["reason"] = r.ok ? ojson(nullptr) : ojson(r.failure);
    return j.dump();
}

ExperimentResult result_from_json(const std::string& line) {
    ojson j;
    try {
        j = ojson::parse(line);
    } catch (const ojson::parse_error& e) {
        throw ParseError(std::string("invalid result line: ") + e.what(), 0);
    }
    try {
        ExperimentResult r;
        const auto& c = j.at("config");
        r.config.representation = parse_representation(c.at("repr").get<std::string>());
        r.config.metric = parse_metric(c.at("metric").get<std::string>());
        r.config.algorithm = parse_algorithm(c.at("algorithm").get<std::string>());
        r.config.k = c.at("K").get<int>();
        r.config.seed = c.at("seed").get<std::uint64_t>();
        r.ok = j.at("status").get<std::string>() == "ok";
        r.runtime_s = j.at("runtime_s").get<double>();
        if (r.ok) {
            std::vector<int> labels;
            for (const auto& [id, label] : j.at("assignment").items()) {
                r.municipality_ids.push_back(id);
                labels.push_back(label.get<int>());
            }
            r.partition.labels = std::move(labels);
            r.partition.k = r.config.k;
            r.partition.achieved_k = j.at("achieved_K").get<int>();
            const auto& m = j.at("metrics");
            if (!m.at("silhouette").is_null()) r.report.silhouette = m.at("silhouette").get<double>();
            r.report.wcss = m.at("wcss").get<double>();
            r.report.population_cv = m.at("pop_cv").get<double>();
            r.report.disconnected_cantons = m.at("disconnected").get<int>();
            const auto& cost = m.at("cost");
            r.report.cost = {cost.at("homogeneity").get<double>(), cost.at("balance").get<double>(),
                             cost.at("compactness").get<double>(), cost.at("total").get<double>()};
        } else {
            r.municipality_ids = j.value("municipalities", std::vector<std::string>{});
            r.failure = j.at("reason").is_null() ? "" : j.at("reason").get<std::string>();
        }
        return r;
    } catch (const ojson::exception& e) {
        throw ParseError(std::string("malformed result line: ") + e.what(), 0);
    }
}

std::string summary_row(const ExperimentResult& r) {
    std::string row = std::string(to_string(r.config.representation)) + "," + std::string(to_string(r.config.metric)) +
                      "," + std::string(to_string(r.config.algorithm)) + "," + std::to_string(r.config.k) + ",";
    if (r.ok) {
        row += (r.report.silhouette ? format_double(*r.report.silhouette) : std::string()) + ",";
        row += format_double(r.report.wcss) + "," + format_double(r.report.population_cv) + "," +
               std::to_string(r.report.disconnected_cantons) + "," + format_double(r.report.cost.total) + ",";
    } else {
        row += ",,,,,";
    }
    row += format_double(r.runtime_s, "%.3f") + "," + (r.ok ? "ok" : "failed");
    return row;
}

// ---------------------------------------------------------------------------
// Grid

std::vector<ExperimentResult> run_grid(const Workspace& ws, const GridOptions& options) {
    const std::vector<ExperimentConfig> configs = options.configs.empty() ? enumerate_grid() : options.configs;
    std::vector<ExperimentResult> results(configs.size());
    std::vector<char> done(configs.size(), 0);

    const bool persist = !options.out_dir.empty();
    const auto jsonl = options.out_dir / "results.jsonl";
    if (persist) {
        std::filesystem::create_directories(options.out_dir);
        std::map<std::string, ExperimentResult> recorded;
        if (std::ifstream in(jsonl); in) {
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                try {
                    ExperimentResult r = result_from_json(line);
                    if (r.ok) recorded[r.config.key()] = std::move(r);
                } catch (const Error&) {
                    // A torn final line from an interrupted run; it is redone.
                }
            }
        }
        for (std::size_t i = 0; i < configs.size(); ++i) {
            const auto it = recorded.find(configs[i].key());
            if (it != recorded.end() && it->second.config == configs[i] &&
                it->second.municipality_ids == ws.panel().municipality_ids) {
                results[i] = it->second;
                done[i] = 1;
            }
        }
    }

    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < configs.size(); ++i)
        if (!done[i]) todo.push_back(i);

    std::ofstream out;
    if (persist && !todo.empty()) {
        out.open(jsonl, std::ios::app);
        if (!out) throw ValidationError("cannot write " + jsonl.string());
    }
    std::mutex write_mutex;
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t t = next++; t < todo.size(); t = next++) {
            const std::size_t i = todo[t];
            results[i] = run_config(configs[i], ws, options.run);
            if (persist) {
                const std::string line = result_to_json(results[i]);
                std::lock_guard lock(write_mutex);
                out << line << '\n';
                out.flush();
            }
        }
    };
    const std::size_t threads =
        std::min<std::size_t>(static_cast<std::size_t>(std::max(options.parallelism, 1)), std::max<std::size_t>(todo.size(), 1));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    if (persist) {
        std::ofstream summary(options.out_dir / "summary.csv", std::ios::trunc);
        summary << kSummaryHeader << '\n';
        for (const auto& r : results) summary << summary_row(r) << '\n';
    }
    return results;
}

Pipeline load_pipeline(const std::filesystem::path& dir, const std::optional<std::filesystem::path>& geo) {
    Pipeline p;
    p.data = load_dataset(dir, geo);
    if (p.data.polygons.empty()) throw ValidationError("no boundary polygons: pass --geo or add municipalities.geojson");
    p.graph = prepare_graph(p.data.panel, p.data.polygons, p.data.mapping);
    p.workspace = std::make_unique<Workspace>(p.graph.panel, p.data.mapping, p.graph.augmented);
    return p;
}

// ---------------------------------------------------------------------------
// Stability

std::vector<StabilityConfig> stability_preset(std::string_view name) {
    const std::string n = lower(name);
    if (n == "table7" || n == "default") {
        return {
            {Representation::BlocShares, Metric::Euclidean, Algorithm::Louvain, 5},
            {Representation::BlocShares, Metric::Cosine, Algorithm::Agglomerative, 5},
            {Representation::NMF5, Metric::Euclidean, Algorithm::SA, 5},
            {Representation::BlocShares, Metric::Euclidean, Algorithm::SA, 5},
            {Representation::RawParty, Metric::Cosine, Algorithm::SA, 5},
            {Representation::PCA5, Metric::Euclidean, Algorithm::SA, 5},
        };
    }
    throw DomainError("unknown stability preset '" + std::string(name) + "'");
}

std::vector<AlignedPanel> split_elections(const AlignedPanel& panel) {
    std::vector<AlignedPanel> out;
    for (int id : panel.election_ids) out.push_back(panel.single_election(id));
    return out;
}

StabilityRun stability_analysis(const StabilityConfig& config, const std::vector<AlignedPanel>& per_election,
                                const ContiguityGraph& graph, const BlocMapping& mapping, const RunOptions& options) {
    if (per_election.size() < 2) throw DomainError("stability needs at least two elections");
    StabilityRun run;
    run.config = config;
    const ExperimentConfig ec = make_config(config.representation, config.metric, config.algorithm, config.k);
    for (const auto& panel : per_election) {
        if (panel.election_count() != 1) throw ValidationError("stability expects single-election panels");
        if (panel.municipality_ids != per_election.front().municipality_ids)
            throw AlignmentError("per-election panels cover different municipalities");
        const Workspace ws(panel, mapping, graph);
        run.election_ids.push_back(panel.election_ids.front());
        run.partitions.push_back(partition_for(ec, ws, options));
    }
    run.report = stability_from_partitions(run.partitions);
    return run;
}

std::string stability_to_json(const StabilityRun& run) {
    ojson j;
    j["config"] = {{"repr", std::string(to_string(run.config.representation))},
                   {"metric", std::string(to_string(run.config.metric))},
                   {"algorithm", std::string(to_string(run.config.algorithm))},
                   {"K", run.config.k}};
    j["elections"] = run.election_ids;
    const auto matrix = [](const Eigen::MatrixXd& m) {
        ojson rows = ojson::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            ojson row = ojson::array();
            for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    j["pairwise_ari"] = matrix(run.report.pairwise_ari);
    j["pairwise_nmi"] = matrix(run.report.pairwise_nmi);
    j["mean_ari"] = run.report.mean_ari;
    j["std_ari"] = run.report.std_ari;
    j["mean_nmi"] = run.report.mean_nmi;
    j["std_nmi"] = run.report.std_nmi;
    return j.dump();
}

// ---------------------------------------------------------------------------
// Seed sweep

Moments moments(const std::vector<double>& values) {
    Moments m;
    if (values.empty()) return m;
    double sum = 0.0;
    for (double v : values) sum += v;
    m.mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(values.size()));
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    m.min = *lo;
    m.max = *hi;
    return m;
}

SweepSummary sa_seed_sweep(const ExperimentConfig& config, const Workspace& ws, int n_seeds, int iterations,
                           const CostWeights& weights) {
    if (config.algorithm != Algorithm::SA) throw DomainError("seed sweep applies to simulated annealing only");
    if (n_seeds < 1) throw DomainError("seed sweep needs at least one seed");
    SweepSummary summary;
    summary.config = config;
    summary.n_seeds = n_seeds;
    summary.iterations = iterations;
    RunOptions options;
    options.cost_weights = weights;
    options.sa_iterations = iterations;
    std::vector<double> sil, cv;
    for (int s = 0; s < n_seeds; ++s) {
        ExperimentConfig c = config;
        c.seed = static_cast<std::uint64_t>(s);
        const ExperimentResult r = run_config(c, ws, options);
        if (!r.ok) throw DomainError("seed " + std::to_string(s) + ": " + r.failure);
        if (r.report.silhouette) sil.push_back(*r.report.silhouette);
        cv.push_back(r.report.population_cv);
    }
    summary.silhouette = moments(sil);
    summary.population_cv = moments(cv);
    return summary;
}

// ---------------------------------------------------------------------------
// Export

std::vector<CantonProfile> canton_profiles(const Partition& partition, std::span<const BlocVector> bloc_shares,
                                           std::span<const double> voter_weights) {
    if (bloc_shares.size() != partition.size() || voter_weights.size() != partition.size())
        throw DomainError("profile inputs disagree on the number of municipalities");
    std::vector<CantonProfile> profiles(static_cast<std::size_t>(partition.achieved_k));
    for (std::size_t c = 0; c < profiles.size(); ++c) profiles[c].canton = static_cast<int>(c);
    for (std::size_t i = 0; i < partition.size(); ++i) {
        auto& p = profiles[static_cast<std::size_t>(partition.labels[i])];
        ++p.municipalities;
        for (std::size_t b = 0; b < kNumBlocs; ++b) p.mean_share_pct[b] += bloc_shares[i][b];
        p.voters += voter_weights[i];
    }
    for (auto& p : profiles)
        if (p.municipalities > 0)
            for (auto& v : p.mean_share_pct) v = 100.0 * v / p.municipalities;
    return profiles;
}

PartitionExport export_partition_geojson(const ExperimentResult& result, std::span<const BoundaryPolygon> polygons,
                                         const Workspace& ws) {
    if (!result.ok) throw DomainError("cannot export a failed run: " + result.failure);
    if (result.municipality_ids != ws.panel().municipality_ids)
        throw ValidationError("result and workspace cover different municipalities");

    std::map<std::string, const BoundaryPolygon*> by_id;
    for (const auto& p : polygons) by_id.emplace(p.municipality_id, &p);
    std::vector<std::string> missing;
    for (const auto& id : result.municipality_ids)
        if (!by_id.count(id)) missing.push_back(id);
    if (!missing.empty()) {
        std::string list;
        for (std::size_t i = 0; i < missing.size() && i < 10; ++i) list += (i ? ", " : "") + missing[i];
        if (missing.size() > 10) list += ", ...";
        throw ValidationError(std::to_string(missing.size()) + " municipalities have no polygon: " + list);
    }

    const auto profiles = canton_profiles(result.partition, ws.bloc_shares(), ws.panel().voter_weight);
    ojson features = ojson::array();
    for (std::size_t i = 0; i < result.municipality_ids.size(); ++i) {
        const BoundaryPolygon& poly = *by_id.at(result.municipality_ids[i]);
        ojson coords = ojson::array();
        for (const auto& part : poly.parts) {
            ojson rings = ojson::array();
            for (const auto& ring : part) {
                ojson pts = ojson::array();
                for (const auto& pt : ring) pts.push_back({pt.lon, pt.lat});
                rings.push_back(std::move(pts));
            }
            coords.push_back(std::move(rings));
        }
        const int canton = result.partition.labels[i];
        ojson means = ojson::object();
        for (std::size_t b = 0; b < kNumBlocs; ++b)
            means[std::string(to_string(static_cast<Bloc>(b)))] =
                profiles[static_cast<std::size_t>(canton)].mean_share_pct[b];
        ojson feature;
        feature["type"] = "Feature";
        feature["properties"] = {{"name", ws.panel().names[i]},
                                 {"municipality_id", result.municipality_ids[i]},
                                 {"canton", canton},
                                 {"bloc_means", std::move(means)}};
        feature["geometry"] = {{"type", "MultiPolygon"}, {"coordinates", std::move(coords)}};
        features.push_back(std::move(feature));
    }
    ojson fc;
    fc["type"] = "FeatureCollection";
    fc["features"] = std::move(features);

    ojson side;
    side["config"] = config_json(result.config);
    side["metrics"] = report_json(result.report);
    ojson rows = ojson::array();
    for (const auto& p : profiles) {
        ojson row;
        row["canton"] = p.canton;
        row["municipalities"] = p.municipalities;
        for (std::size_t b = 0; b < kNumBlocs; ++b)
            row[std::string(to_string(static_cast<Bloc>(b))) + "_pct"] = p.mean_share_pct[b];
        row["voters"] = p.voters;
        rows.push_back(std::move(row));
    }
    side["cantons"] = std::move(rows);
    return {fc.dump(), side.dump(2)};
}

}  // namespace cantons
