#include "cantons/distances.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "cantons/error.hpp"

namespace cantons {

namespace {

double euclidean(std::span<const double> p, std::span<const double> q) {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += (p[i] - q[i]) * (p[i] - q[i]);
    return std::sqrt(sum);
}

double cosine(std::span<const double> p, std::span<const double> q) {
    double dot = 0.0, pp = 0.0, qq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        dot += p[i] * q[i];
        pp += p[i] * p[i];
        qq += q[i] * q[i];
    }
    if (pp == 0.0 || qq == 0.0) throw DomainError("cosine distance of a zero vector");
    if (std::equal(p.begin(), p.end(), q.begin())) return 0.0;
    const double sim = dot / (std::sqrt(pp) * std::sqrt(qq));
    return std::clamp(1.0 - sim, 0.0, 2.0);
}

double simplex_sum(std::span<const double> p) {
    double sum = 0.0;
    for (double v : p) {
        if (v < 0.0) throw DomainError("Jensen-Shannon distance requires non-negative inputs");
        sum += v;
    }
    if (!(sum > 0.0)) throw DomainError("Jensen-Shannon distance of a zero-sum vector");
    return sum;
}

double jensen_shannon(std::span<const double> p, std::span<const double> q) {
    const double ps = simplex_sum(p), qs = simplex_sum(q);
    double jsd = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double a = p[i] / ps, b = q[i] / qs;
        const double m = 0.5 * (a + b);
        if (a > 0.0) jsd += 0.5 * a * std::log2(a / m);
        if (b > 0.0) jsd += 0.5 * b * std::log2(b / m);
    }
    return std::sqrt(std::clamp(jsd, 0.0, 1.0));
}

}  // namespace

std::string_view to_string(Metric metric) {
    switch (metric) {
        case Metric::Euclidean: return "Euclidean";
        case Metric::Cosine: return "Cosine";
        case Metric::JensenShannon: return "JensenShannon";
    }
    return "Euclidean";
}

Metric parse_metric(std::string_view text) {
    std::string key;
    for (char c : text)
        if (c != '_' && c != '-' && c != ' ') key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (key == "euclidean" || key == "l2") return Metric::Euclidean;
    if (key == "cosine") return Metric::Cosine;
    if (key == "jensenshannon" || key == "jsd" || key == "js") return Metric::JensenShannon;
    throw ParseError("unknown metric '" + std::string(text) + "'", 0);
}

double distance(Metric metric, std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size())
        throw DomainError("distance between vectors of dimension " + std::to_string(p.size()) + " and " +
                          std::to_string(q.size()));
    switch (metric) {
        case Metric::Euclidean: return euclidean(p, q);
        case Metric::Cosine: return cosine(p, q);
        case Metric::JensenShannon: return jensen_shannon(p, q);
    }
    throw DomainError("unknown metric");
}

DistanceMatrix pairwise_matrix(Metric metric, const Eigen::MatrixXd& rows, std::vector<std::string> row_ids) {
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RowMajor data = rows;
    const Eigen::Index n = data.rows();
    const auto d = static_cast<std::size_t>(data.cols());

    DistanceMatrix dm;
    dm.metric = metric;
    dm.row_ids = std::move(row_ids);
    dm.values = Eigen::MatrixXd::Zero(n, n);
    const auto row = [&](Eigen::Index i) { return std::span<const double>(data.data() + i * data.cols(), d); };

    // Validate every row up front so identical rows still raise domain errors.
    if (metric != Metric::Euclidean) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (metric == Metric::JensenShannon) simplex_sum(row(i));
            else if (data.row(i).squaredNorm() == 0.0) throw DomainError("cosine distance of a zero vector");
        }
    }
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = distance(metric, row(i), row(j));
            dm.values(i, j) = v;
            dm.values(j, i) = v;
        }
    return dm;
}

DistanceMatrix pairwise_matrix(Metric metric, const FeatureMatrix& features) {
    return pairwise_matrix(metric, features.values, features.row_ids);
}

}  // namespace cantons
