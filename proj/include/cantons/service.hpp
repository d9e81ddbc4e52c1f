#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace cantons {

struct ServiceOptions {
    std::filesystem::path data_dir;
    std::optional<std::filesystem::path> geo;
    std::optional<std::filesystem::path> results_dir;  // holds results.jsonl
    int workers = 2;          // concurrent what-if computations
    int queue_capacity = 8;   // what-if requests waiting beyond the workers
    int whatif_sa_iterations = 5000;
};

struct ApiRequest {
    std::string method = "GET";
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

struct ApiResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// JSON API over a loaded data directory and optional grid results.
///
///   GET  /api/geo                              base boundaries (GeoJSON)
///   GET  /api/configs                          precomputed results
///   GET  /api/partition?repr&metric&algo&k     partition GeoJSON, report, profiles
///   POST /api/whatif                           fresh run on the worker pool
///   GET  /api/stability?preset=table7          cross-election agreement
///
/// Errors are `{"error": reason}` with 400 (bad request), 404 (no such
/// result), 422 (computation failed) or 503 (what-if queue full, retry).
class Service {
public:
    /// Loads and validates everything up front; throws on any inconsistency.
    explicit Service(ServiceOptions options);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Thread-safe request dispatch, independent of the HTTP layer.
    ApiResponse handle(const ApiRequest& request) const;

    /// Binds the HTTP listener; port 0 picks a free port. Returns the bound
    /// port or -1.
    int bind(const std::string& host, int port);
    void listen();  // blocks until stop()
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace cantons
