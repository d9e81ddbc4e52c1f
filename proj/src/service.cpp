#include "cantons/service.hpp"

#include <condition_variable>
#include <deque>
#include <fstream>
#include <functional>
#include <future>
#include <mutex>
#include <thread>

// Eigen must come before httplib: <resolv.h> defines a `_res` macro that
// collides with Eigen parameter names.
#include "cantons/error.hpp"
#include "cantons/experiments.hpp"

#define CPPHTTPLIB_ZLIB_SUPPORT
#include <httplib.h>
#include <json.hpp>

namespace cantons {

using nlohmann::json;

namespace {

struct BadRequest : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ApiResponse error_response(int status, const std::string& reason) {
    return {status, json{{"error", reason}}.dump()};
}

// Fixed worker threads over a bounded queue. A submission is refused when
// every worker is busy and the queue is full.
class WorkerPool {
public:
    WorkerPool(int workers, int capacity) : capacity_(static_cast<std::size_t>(std::max(capacity, 0))) {
        for (int i = 0; i < std::max(workers, 1); ++i) threads_.emplace_back([this] { run(); });
        workers_ = threads_.size();
    }

    ~WorkerPool() {
        {
            std::lock_guard lock(mutex_);
            stopping_ = true;
        }
        cv_.notify_all();
        for (auto& t : threads_) t.join();
    }

    std::optional<std::future<ApiResponse>> try_submit(std::function<ApiResponse()> job) {
        Task task{std::move(job), {}};
        auto future = task.result.get_future();
        {
            std::lock_guard lock(mutex_);
            if (queue_.size() + busy_ >= workers_ + capacity_) return std::nullopt;
            queue_.push_back(std::move(task));
        }
        cv_.notify_one();
        return future;
    }

private:
    void run() {
        while (true) {
            Task task;
            {
                std::unique_lock lock(mutex_);
                cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
                if (queue_.empty()) return;
                task = std::move(queue_.front());
                queue_.pop_front();
                ++busy_;
            }
            std::optional<ApiResponse> response;
            std::exception_ptr failure;
            try {
                response = task.job();
            } catch (...) {
                failure = std::current_exception();
            }
            {
                // Free the slot before the caller can observe the result.
                std::lock_guard lock(mutex_);
                --busy_;
            }
            if (failure) task.result.set_exception(failure);
            else task.result.set_value(std::move(*response));
        }
    }

    struct Task {
        std::function<ApiResponse()> job;
        std::promise<ApiResponse> result;
    };

    std::size_t capacity_;
    std::size_t workers_ = 0;
    std::size_t busy_ = 0;
    bool stopping_ = false;
    std::deque<Task> queue_;
    std::mutex mutex_;
    std::condition_variable cv_;
    std::vector<std::thread> threads_;
};

json config_json(const ExperimentConfig& c) {
    return {{"repr", std::string(to_string(c.representation))},
            {"metric", std::string(to_string(c.metric))},
            {"algorithm", std::string(to_string(c.algorithm))},
            {"K", c.k},
            {"seed", c.seed}};
}

json report_json(const EvaluationReport& r) {
    return {{"silhouette", r.silhouette ? json(*r.silhouette) : json(nullptr)},
            {"wcss", r.wcss},
            {"pop_cv", r.population_cv},
            {"disconnected", r.disconnected_cantons},
            {"cost",
             {{"homogeneity", r.cost.homogeneity},
              {"balance", r.cost.balance},
              {"compactness", r.cost.compactness},
              {"total", r.cost.total}}}};
}

std::string query_value(const ApiRequest& req, const std::string& key) {
    const auto it = req.query.find(key);
    if (it == req.query.end() || it->second.empty()) throw BadRequest("missing query parameter '" + key + "'");
    return it->second;
}

int parse_k(const std::string& text) {
    std::size_t used = 0;
    int k = 0;
    try {
        k = std::stoi(text, &used);
    } catch (const std::exception&) {
        throw BadRequest("K must be an integer");
    }
    if (used != text.size()) throw BadRequest("K must be an integer");
    return k;
}

template <typename F>
auto as_bad_request(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        throw BadRequest(e.what());
    }
}

}  // namespace

struct Service::Impl {
    ServiceOptions options;
    Pipeline pipeline;
    std::string geo_text;
    std::map<std::string, ExperimentResult> results;  // by config key
    std::unique_ptr<WorkerPool> pool;

    mutable std::mutex stability_mutex;
    mutable std::map<std::string, std::string> stability_cache;

    httplib::Server server;
    int bound_port = -1;

    ExperimentConfig config_from(Representation rep, Metric metric, Algorithm algo, int k) const {
        ExperimentConfig c = make_config(rep, metric, algo, k);
        if (!c.is_valid())
            throw BadRequest(std::string(to_string(rep)) + " cannot be combined with " + std::string(to_string(metric)));
        const auto n = static_cast<int>(pipeline.workspace->panel().size());
        if (k < 1 || k > n) throw BadRequest("K must be in 1.." + std::to_string(n));
        return c;
    }

    json partition_payload(const ExperimentResult& r) const {
        const PartitionExport ex = export_partition_geojson(r, pipeline.data.polygons, *pipeline.workspace);
        json side = json::parse(ex.profiles);
        return {{"config", config_json(r.config)},
                {"geojson", json::parse(ex.geojson)},
                {"report", report_json(r.report)},
                {"profiles", side["cantons"]},
                {"achieved_K", r.partition.achieved_k}};
    }

    ApiResponse configs() const {
        json rows = json::array();
        for (const auto& cfg : enumerate_grid()) {
            const auto it = results.find(cfg.key());
            if (it == results.end()) continue;
            const ExperimentResult& r = it->second;
            rows.push_back({{"repr", std::string(to_string(cfg.representation))},
                            {"metric", std::string(to_string(cfg.metric))},
                            {"algorithm", std::string(to_string(cfg.algorithm))},
                            {"K", cfg.k},
                            {"status", r.ok ? "ok" : "failed"},
                            {"silhouette", r.ok && r.report.silhouette ? json(*r.report.silhouette) : json(nullptr)},
                            {"pop_cv", r.ok ? json(r.report.population_cv) : json(nullptr)}});
        }
        return {200, json{{"grid_size", enumerate_grid().size()}, {"results", rows}}.dump()};
    }

    ApiResponse partition(const ApiRequest& req) const {
        const auto rep = as_bad_request([&] { return parse_representation(query_value(req, "repr")); });
        const auto metric = as_bad_request([&] { return parse_metric(query_value(req, "metric")); });
        const auto algo = as_bad_request([&] { return parse_algorithm(query_value(req, "algo")); });
        const ExperimentConfig cfg = config_from(rep, metric, algo, parse_k(query_value(req, "k")));
        const auto it = results.find(cfg.key());
        if (it == results.end() || !it->second.ok) return error_response(404, "no precomputed result for " + cfg.key());
        return {200, partition_payload(it->second).dump()};
    }

    ApiResponse whatif(const ApiRequest& req) const {
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::parse_error&) {
            throw BadRequest("body is not valid JSON");
        }
        if (!body.is_object()) throw BadRequest("body must be a JSON object");
        const auto text = [&](const char* key) {
            if (!body.contains(key) || !body[key].is_string()) throw BadRequest(std::string("missing string field '") + key + "'");
            return body[key].get<std::string>();
        };
        const auto rep = as_bad_request([&] { return parse_representation(text("representation")); });
        const auto metric = as_bad_request([&] { return parse_metric(text("metric")); });
        const auto algo = as_bad_request([&] { return parse_algorithm(text("algorithm")); });
        if (!body.contains("K") || !body["K"].is_number_integer()) throw BadRequest("missing integer field 'K'");
        ExperimentConfig cfg = config_from(rep, metric, algo, body["K"].get<int>());
        if (body.contains("seed") && !body["seed"].is_null()) {
            if (!body["seed"].is_number_unsigned()) throw BadRequest("seed must be a non-negative integer");
            cfg.seed = body["seed"].get<std::uint64_t>();
        }

        RunOptions run;
        if (body.contains("cost_weights") && !body["cost_weights"].is_null()) {
            const json& w = body["cost_weights"];
            if (!w.is_object()) throw BadRequest("cost_weights must be an object");
            const auto weight = [&](const char* key, double fallback) {
                if (!w.contains(key)) return fallback;
                if (!w[key].is_number()) throw BadRequest(std::string("weight '") + key + "' must be a number");
                const double v = w[key].get<double>();
                if (!(v >= 0.0)) throw BadRequest(std::string("weight '") + key + "' must be >= 0");
                return v;
            };
            run.cost_weights = {weight("alpha", 0.4), weight("beta", 0.4), weight("gamma", 0.2)};
        }
        run.sa_iterations = options.whatif_sa_iterations;
        if (body.contains("sa_iterations") && !body["sa_iterations"].is_null()) {
            if (!body["sa_iterations"].is_number_integer() || body["sa_iterations"].get<long long>() < 1)
                throw BadRequest("sa_iterations must be a positive integer");
            run.sa_iterations = body["sa_iterations"].get<int>();
        }

        json effective = config_json(cfg);
        effective["cost_weights"] = {
            {"alpha", run.cost_weights.alpha}, {"beta", run.cost_weights.beta}, {"gamma", run.cost_weights.gamma}};
        effective["sa_iterations"] = *run.sa_iterations;

        auto future = pool->try_submit([this, cfg, run, effective]() -> ApiResponse {
            const ExperimentResult r = run_config(cfg, *pipeline.workspace, run);
            if (!r.ok) return {422, json{{"error", r.failure}, {"config", effective}}.dump()};
            json payload = partition_payload(r);
            payload["config"] = effective;
            return {200, payload.dump()};
        });
        if (!future) return error_response(503, "what-if queue is full, retry later");
        return future->get();
    }

    ApiResponse stability(const ApiRequest& req) const {
        const auto it = req.query.find("preset");
        const std::string preset = it == req.query.end() || it->second.empty() ? "table7" : it->second;
        const auto configs = as_bad_request([&] { return stability_preset(preset); });
        std::lock_guard lock(stability_mutex);
        if (const auto cached = stability_cache.find(preset); cached != stability_cache.end()) return {200, cached->second};
        const auto panels = split_elections(pipeline.workspace->panel());
        json reports = json::array();
        for (const auto& sc : configs)
            reports.push_back(json::parse(
                stability_to_json(stability_analysis(sc, panels, pipeline.workspace->graph(), pipeline.data.mapping))));
        std::string body = json{{"preset", preset}, {"reports", reports}}.dump();
        stability_cache.emplace(preset, body);
        return {200, body};
    }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>()) {
    impl_->options = std::move(options);
    Impl& s = *impl_;
    s.pipeline = load_pipeline(s.options.data_dir, s.options.geo);
    s.geo_text = read_text_file(s.options.geo ? *s.options.geo : s.options.data_dir / "municipalities.geojson");

    if (s.options.results_dir) {
        const auto path = *s.options.results_dir / "results.jsonl";
        std::ifstream in(path);
        if (!in) throw MissingFileError("cannot read " + path.string());
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            ExperimentResult r;
            try {
                r = result_from_json(line);
            } catch (const ParseError& e) {
                throw ParseError(path.filename().string() + ": " + e.message(), line_no);
            }
            if (r.ok && r.municipality_ids != s.pipeline.workspace->panel().municipality_ids)
                throw ValidationError(path.string() + " was computed on a different municipality set");
            s.results[r.config.key()] = std::move(r);
        }
    }
    s.pool = std::make_unique<WorkerPool>(s.options.workers, s.options.queue_capacity);

    const auto to_request = [](const httplib::Request& req, const char* method) {
        ApiRequest r;
        r.method = method;
        r.path = req.path;
        for (const auto& [k, v] : req.params) r.query[k] = v;
        r.body = req.body;
        return r;
    };
    const auto reply = [this](httplib::Response& res, const ApiResponse& api) {
        res.status = api.status;
        res.set_content(api.body, api.content_type);
    };
    s.server.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    s.server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    s.server.Get(R"(/api/.*)", [this, to_request, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, handle(to_request(req, "GET")));
    });
    s.server.Post(R"(/api/.*)", [this, to_request, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, handle(to_request(req, "POST")));
    });
}

Service::~Service() { stop(); }

ApiResponse Service::handle(const ApiRequest& req) const {
    const Impl& s = *impl_;
    try {
        if (req.method == "GET" && req.path == "/api/geo") return {200, s.geo_text, "application/geo+json"};
        if (req.method == "GET" && req.path == "/api/configs") return s.configs();
        if (req.method == "GET" && req.path == "/api/partition") return s.partition(req);
        if (req.method == "POST" && req.path == "/api/whatif") return s.whatif(req);
        if (req.method == "GET" && req.path == "/api/stability") return s.stability(req);
        return error_response(404, "no route for " + req.method + " " + req.path);
    } catch (const BadRequest& e) {
        return error_response(400, e.what());
    } catch (const std::exception& e) {
        return error_response(422, e.what());
    }
}

int Service::bind(const std::string& host, int port) {
    Impl& s = *impl_;
    s.bound_port = port == 0 ? s.server.bind_to_any_port(host) : (s.server.bind_to_port(host, port) ? port : -1);
    return s.bound_port;
}

void Service::listen() { impl_->server.listen_after_bind(); }

void Service::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace cantons
