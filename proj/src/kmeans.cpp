#include <algorithm>
#include <limits>
#include <random>

#include "cantons/error.hpp"
#include "cantons/partitioners.hpp"

namespace cantons {

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double squared_distance(const Eigen::MatrixXd& x, Eigen::Index i, const Eigen::MatrixXd& c, Eigen::Index j) {
    return (x.row(i) - c.row(j)).squaredNorm();
}

// k-means++: first centre uniform, then proportional to squared distance.
Eigen::MatrixXd seed_centroids(const Eigen::MatrixXd& x, int k, std::mt19937_64& rng) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd centroids(k, x.cols());
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    Eigen::Index first = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(n));
    centroids.row(0) = x.row(first);
    used[static_cast<std::size_t>(first)] = 1;

    std::vector<double> d2(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = squared_distance(x, i, centroids, 0);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (double v : d2) total += v;
        Eigen::Index chosen = -1;
        if (total > 0.0) {
            double target = unit(rng) * total;
            for (Eigen::Index i = 0; i < n; ++i) {
                target -= d2[static_cast<std::size_t>(i)];
                if (target < 0.0 && d2[static_cast<std::size_t>(i)] > 0.0) {
                    chosen = i;
                    break;
                }
            }
            if (chosen < 0)
                for (Eigen::Index i = n - 1; i >= 0 && chosen < 0; --i)
                    if (d2[static_cast<std::size_t>(i)] > 0.0) chosen = i;
        } else {
            // All remaining points coincide with a centre.
            for (Eigen::Index i = 0; i < n && chosen < 0; ++i)
                if (!used[static_cast<std::size_t>(i)]) chosen = i;
        }
        used[static_cast<std::size_t>(chosen)] = 1;
        centroids.row(c) = x.row(chosen);
        for (Eigen::Index i = 0; i < n; ++i)
            d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], squared_distance(x, i, centroids, c));
    }
    return centroids;
}

struct Run {
    std::vector<int> labels;
    Eigen::MatrixXd centroids;
    double wcss = 0.0;
    std::vector<double> history;
};

Run lloyd(const Eigen::MatrixXd& x, int k, int max_iter, std::mt19937_64& rng) {
    const Eigen::Index n = x.rows();
    Run run;
    run.centroids = seed_centroids(x, k, rng);
    run.labels.assign(static_cast<std::size_t>(n), -1);

    for (int it = 0; it < std::max(max_iter, 1); ++it) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = squared_distance(x, i, run.centroids, c);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (run.labels[static_cast<std::size_t>(i)] != best) {
                run.labels[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }

        // Empty clusters take the point farthest from its centroid.
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (int l : run.labels) ++counts[static_cast<std::size_t>(l)];
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) continue;
            Eigen::Index far = -1;
            double far_d = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const int l = run.labels[static_cast<std::size_t>(i)];
                if (counts[static_cast<std::size_t>(l)] <= 1) continue;
                const double d = squared_distance(x, i, run.centroids, l);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far < 0) break;
            --counts[static_cast<std::size_t>(run.labels[static_cast<std::size_t>(far)])];
            run.labels[static_cast<std::size_t>(far)] = c;
            counts[static_cast<std::size_t>(c)] = 1;
            changed = true;
        }

        run.centroids.setZero();
        for (Eigen::Index i = 0; i < n; ++i) run.centroids.row(run.labels[static_cast<std::size_t>(i)]) += x.row(i);
        for (int c = 0; c < k; ++c)
            if (counts[static_cast<std::size_t>(c)] > 0) run.centroids.row(c) /= counts[static_cast<std::size_t>(c)];

        double wcss = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            wcss += squared_distance(x, i, run.centroids, run.labels[static_cast<std::size_t>(i)]);
        run.history.push_back(wcss);
        run.wcss = wcss;
        if (!changed) break;
    }
    return run;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& features, int k, const KMeansParams& params) {
    const Eigen::Index n = features.rows();
    if (k < 1 || k > n) throw DomainError("canton count " + std::to_string(k) + " outside 1.." + std::to_string(n));
    if (params.n_init < 1) throw DomainError("n_init must be >= 1");

    std::mt19937_64 rng(params.seed);
    Run best;
    bool have = false;
    for (int init = 0; init < params.n_init; ++init) {
        Run run = lloyd(features, k, params.max_iter, rng);
        if (!have || run.wcss < best.wcss) {
            best = std::move(run);
            have = true;
        }
    }

    KMeansResult result;
    result.partition = Partition::from_labels(best.labels, k);
    result.wcss = best.wcss;
    result.history = std::move(best.history);
    // Centroid rows follow the canonical labels.
    result.centroids.resize(k, features.cols());
    std::vector<char> done(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < best.labels.size(); ++i) {
        const int to = result.partition.labels[i];
        if (!done[static_cast<std::size_t>(to)]) {
            result.centroids.row(to) = best.centroids.row(best.labels[i]);
            done[static_cast<std::size_t>(to)] = 1;
        }
    }
    return result;
}

Partition kmeans_partition(const Eigen::MatrixXd& features, int k, const KMeansParams& params) {
    return kmeans(features, k, params).partition;
}

}  // namespace cantons
