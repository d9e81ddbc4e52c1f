#include "cantons/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cantons/error.hpp"

namespace cantons {

namespace {

using nlohmann::ordered_json;

struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    double unit() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
    double normal() {
        const double u1 = 1.0 - unit();
        const double u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine() % n); }
};

// Integer allocation of `total` proportional to `weights` (largest remainder,
// ties to the lower index).
std::vector<VoteCount> apportion(const std::vector<double>& weights, VoteCount total) {
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<VoteCount> out(weights.size(), 0);
    if (weights.empty() || total <= 0 || sum <= 0.0) return out;
    std::vector<std::pair<double, std::size_t>> rest;
    VoteCount used = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact = static_cast<double>(total) * weights[i] / sum;
        out[i] = static_cast<VoteCount>(std::floor(exact));
        used += out[i];
        rest.emplace_back(exact - std::floor(exact), i);
    }
    std::stable_sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; used < total; r = (r + 1) % rest.size(), ++used) ++out[rest[r].second];
    return out;
}

// Like apportion, but no entry exceeds its cap.
std::vector<VoteCount> apportion_capped(const std::vector<double>& weights, const std::vector<VoteCount>& caps,
                                        VoteCount total) {
    std::vector<VoteCount> out(weights.size(), 0);
    std::vector<char> fixed(weights.size(), 0);
    VoteCount remaining = total;
    while (true) {
        std::vector<double> w;
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < weights.size(); ++i)
            if (!fixed[i]) {
                w.push_back(weights[i]);
                idx.push_back(i);
            }
        const auto part = apportion(w, remaining);
        bool clipped = false;
        for (std::size_t j = 0; j < idx.size(); ++j)
            if (part[j] > caps[idx[j]]) {
                out[idx[j]] = caps[idx[j]];
                fixed[idx[j]] = 1;
                remaining -= caps[idx[j]];
                clipped = true;
            }
        if (!clipped) {
            for (std::size_t j = 0; j < idx.size(); ++j) out[idx[j]] = part[j];
            return out;
        }
    }
}

enum class Region { Metro, South, North, Galilee, Periphery, Haredi };

// Right, Haredi, Center, Left, Arab; Other is the remainder.
constexpr std::array<std::array<double, 5>, 6> kProfiles{{
    {0.297, 0.144, 0.420, 0.110, 0.011},
    {0.449, 0.108, 0.300, 0.103, 0.010},
    {0.380, 0.069, 0.312, 0.109, 0.104},
    {0.019, 0.011, 0.022, 0.038, 0.899},
    {0.022, 0.010, 0.043, 0.050, 0.861},
    {0.120, 0.780, 0.050, 0.010, 0.010},
}};

constexpr std::array<NationalTotals, 5> kTotals{{
    {6014124, 3873326},
    {6061316, 3950538},
    {6118607, 4048714},
    {6232307, 3781640},
    {6426211, 4084119},
}};

struct PartySpec {
    const char* symbol;
    Bloc bloc;
    double weight;  // within-bloc share
};

std::vector<PartySpec> parties_for(int election) {
    using B = Bloc;
    switch (election) {
        case 1:
            return {{"likud", B::Right, 0.72}, {"yisrael_beiteinu", B::Right, 0.13}, {"new_right", B::Right, 0.15},
                    {"shas", B::Haredi, 0.52}, {"utj", B::Haredi, 0.48},       {"blue_white", B::Center, 1.0},
                    {"labor", B::Left, 0.55},  {"meretz", B::Left, 0.45},      {"hadash_taal", B::Arab, 0.58},
                    {"raam_balad", B::Arab, 0.42}, {"other", B::Other, 1.0}};
        case 2:
            return {{"likud", B::Right, 0.66}, {"yisrael_beiteinu", B::Right, 0.20}, {"yamina", B::Right, 0.14},
                    {"shas", B::Haredi, 0.54}, {"utj", B::Haredi, 0.46},       {"blue_white", B::Center, 1.0},
                    {"labor_gesher", B::Left, 0.52}, {"democratic_union", B::Left, 0.48},
                    {"joint_list", B::Arab, 1.0}, {"other", B::Other, 1.0}};
        case 3:
            return {{"likud", B::Right, 0.70}, {"yisrael_beiteinu", B::Right, 0.17}, {"yamina", B::Right, 0.13},
                    {"shas", B::Haredi, 0.55}, {"utj", B::Haredi, 0.45},       {"blue_white", B::Center, 1.0},
                    {"labor_meretz", B::Left, 1.0}, {"joint_list", B::Arab, 1.0}, {"other", B::Other, 1.0}};
        case 4:
            return {{"likud", B::Right, 0.55},          {"yisrael_beiteinu", B::Right, 0.12},
                    {"yamina", B::Right, 0.12},         {"religious_zionism", B::Right, 0.10},
                    {"new_hope", B::Right, 0.11},       {"shas", B::Haredi, 0.53},
                    {"utj", B::Haredi, 0.47},           {"yesh_atid", B::Center, 0.68},
                    {"blue_white", B::Center, 0.32},    {"labor", B::Left, 0.55},
                    {"meretz", B::Left, 0.45},          {"joint_list", B::Arab, 0.61},
                    {"raam", B::Arab, 0.39},            {"other", B::Other, 1.0}};
        default:
            return {{"likud", B::Right, 0.64},          {"yisrael_beiteinu", B::Right, 0.13},
                    {"religious_zionism", B::Right, 0.23}, {"shas", B::Haredi, 0.55},
                    {"utj", B::Haredi, 0.45},           {"yesh_atid", B::Center, 0.70},
                    {"national_unity", B::Center, 0.30}, {"labor", B::Left, 0.55},
                    {"meretz", B::Left, 0.45},          {"hadash_taal", B::Arab, 0.36},
                    {"raam", B::Arab, 0.40},            {"balad", B::Arab, 0.24},
                    {"other", B::Other, 1.0}};
    }
}

struct Municipality {
    std::string name;
    std::string district;
    Region region = Region::South;
    std::vector<std::vector<std::vector<std::array<double, 2>>>> parts;  // polygons > rings > points
    bool analysis = true;  // false: geography plus elections 1-3 only
    double size = 1.0;
    std::array<double, 6> lean{};  // persistent share multipliers
};

using Pt = std::array<double, 2>;

constexpr double kCell = 0.1;
constexpr double kLon0 = 34.3;
constexpr double kLat0 = 29.6;

Pt at(double x, double y) { return {kLon0 + kCell * x, kLat0 + kCell * y}; }

// Counter-clockwise rectangle ring, optionally with midpoints on the bottom
// and right sides.
std::vector<Pt> rect(double x0, double y0, double x1, double y1, bool midpoints) {
    std::vector<Pt> ring{at(x0, y0)};
    if (midpoints) ring.push_back(at(0.5 * (x0 + x1), y0));
    ring.push_back(at(x1, y0));
    if (midpoints) ring.push_back(at(x1, 0.5 * (y0 + y1)));
    ring.push_back(at(x1, y1));
    ring.push_back(at(x0, y1));
    ring.push_back(at(x0, y0));
    return ring;
}

// Row shifts of the main grid: from column m on, cells sit on half-integer
// offsets (cell m is 1.5 wide, the last one 0.5). Tuned so the analysis
// subset has 488 boundary edges.
int row_shift(int row) {
    switch (row) {
        case 2: case 5: case 8: case 11: return 8;
        case 13: return 2;
        default: return -1;
    }
}

std::vector<std::pair<double, double>> row_cells(int row) {
    std::vector<std::pair<double, double>> cells;
    const int m = row_shift(row);
    for (int c = 0; c < 16; ++c) {
        if (m < 0 || c < m) cells.emplace_back(c, c + 1);
        else if (c == m) cells.emplace_back(c, c + 1.5);
        else if (c < 15) cells.emplace_back(c + 0.5, c + 1.5);
        else cells.emplace_back(15.5, 16);
    }
    return cells;
}

Region grid_region(int x, int y) {
    if (y >= 10) return (x >= 3 && x <= 13) ? Region::Galilee : Region::North;
    if (y >= 6) return x <= 13 ? Region::North : Region::Metro;
    if (y >= 3) return x >= 9 ? Region::Metro : Region::South;
    if (y <= 1 && x <= 5) return Region::Periphery;
    return Region::South;
}

std::string grid_district(int x, int y) {
    if (y >= 10) return "Northern";
    if (y >= 6) return x <= 7 ? "Haifa" : "Central";
    if (y >= 3) return x >= 12 ? "Tel Aviv" : (x >= 9 ? "Central" : "Jerusalem");
    return "Southern";
}

std::vector<std::string> make_names(Rng& rng, std::size_t count) {
    static const char* prefixes[] = {"Kfar", "Givat", "Kiryat", "Ramat", "Neve",   "Beit",  "Ein",   "Migdal",
                                     "Nahal", "Ma'ale", "Har",  "Gan",   "Mitzpe", "Sde",   "Tzur",  "Even"};
    static const char* roots[] = {"Alon",  "Oren",  "Shaked", "Tamar", "Dekel",  "Erez",   "Zayit", "Rimon",
                                  "Ela",   "Hadas", "Gefen",  "Arava", "Carmel", "Tavor",  "Yarden", "Golan"};
    std::vector<std::string> names;
    for (const char* p : prefixes)
        for (const char* r : roots) names.push_back(std::string(p) + " " + r);
    for (std::size_t i = names.size(); i > 1; --i) std::swap(names[i - 1], names[rng.below(i)]);
    names.resize(count);
    return names;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) s.replace(pos, from.size(), to);
    return s;
}

}  // namespace

const NationalTotals& national_totals(int election_id) {
    if (election_id < 1 || election_id > 5) throw DomainError("election id must be 1..5");
    return kTotals[static_cast<std::size_t>(election_id - 1)];
}

FixtureFiles synthetic_fixture(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Municipality> munis;

    // Main grid, 16 x 14.
    for (int y = 0; y < 14; ++y) {
        const auto cells = row_cells(y);
        for (int x = 0; x < 16; ++x) {
            Municipality m;
            m.region = grid_region(x, y);
            m.district = grid_district(x, y);
            const auto [x0, x1] = cells[static_cast<std::size_t>(x)];
            m.parts.push_back({rect(x0, y, x1, y + 1, (x + y) % 3 == 0)});
            munis.push_back(std::move(m));
        }
    }
    // A lake inside one cell, and a detached islet for another.
    munis[5 * 16 + 4].parts[0].push_back({at(4.3, 5.3), at(4.3, 5.6), at(4.6, 5.6), at(4.6, 5.3), at(4.3, 5.3)});
    munis[0].parts.push_back({rect(-2.0, -1.5, -1.6, -1.1, false)});

    // Two-cell island and three isolates, away from the grid.
    const auto off_grid = [&](double x, double y, Region region, const char* district) {
        Municipality m;
        m.region = region;
        m.district = district;
        m.parts.push_back({rect(x, y, x + 1, y + 1, false)});
        munis.push_back(std::move(m));
    };
    off_grid(18, 1, Region::Periphery, "Southern");
    off_grid(19, 1, Region::Periphery, "Southern");
    off_grid(18, 4, Region::Haredi, "Central");
    off_grid(18, 7, Region::Haredi, "Jerusalem");
    off_grid(-3, 3, Region::Periphery, "Southern");

    // Geography-only extras along the northern edge.
    for (int x = 0; x < 5; ++x) {
        Municipality m;
        m.region = Region::North;
        m.district = "Northern";
        m.analysis = false;
        m.parts.push_back({rect(x, 14, x + 1, 15, false)});
        munis.push_back(std::move(m));
    }

    const auto names = make_names(rng, munis.size());
    for (std::size_t i = 0; i < munis.size(); ++i) munis[i].name = names[i];
    // One well-known name with spelling variants across files.
    munis[4 * 16 + 13].name = "Tel Aviv - Yafo";

    for (auto& m : munis) {
        const double scale = m.region == Region::Metro ? 2.2 : (m.region == Region::Haredi ? 1.8 : 1.0);
        m.size = scale * std::exp(1.0 * rng.normal());
        for (auto& l : m.lean) l = std::exp(0.25 * rng.normal());
    }

    FixtureFiles files;

    // Aliases: election files spell a few municipalities differently.
    std::vector<std::pair<std::string, std::string>> aliases{{"Tel-Aviv\xe2\x80\x93Yafo", "tel aviv - yafo"}};
    std::map<std::size_t, std::string> variant_of;  // municipality -> variant used in elections 4 and 5
    for (std::size_t i = 0; i < munis.size() && variant_of.size() < 3; ++i)
        if (munis[i].analysis && munis[i].name.rfind("Kiryat ", 0) == 0) {
            const std::string variant = "Qiryat " + munis[i].name.substr(7);
            variant_of[i] = variant;
            aliases.emplace_back(variant, normalize_name(munis[i].name));
        }
    {
        std::string text = "variant,canonical\n";
        for (const auto& [v, c] : aliases) text += csv_field(v) + "," + csv_field(c) + "\n";
        files["aliases.csv"] = text;
    }

    // Bloc mapping covers every party symbol except "other".
    {
        std::map<std::string, Bloc> mapping;
        for (int e = 1; e <= 5; ++e)
            for (const auto& p : parties_for(e))
                if (p.bloc != Bloc::Other) mapping[p.symbol] = p.bloc;
        std::string text = "party_symbol,bloc\n";
        for (const auto& [symbol, bloc] : mapping) text += symbol + "," + std::string(to_string(bloc)) + "\n";
        files["blocs.csv"] = text;
    }

    for (int e = 1; e <= 5; ++e) {
        const auto parties = parties_for(e);
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < munis.size(); ++i)
            if (munis[i].analysis || e <= 3) rows.push_back(i);

        std::vector<double> eligible_w, turnout;
        for (std::size_t i : rows) {
            eligible_w.push_back(munis[i].size * (1.0 + 0.01 * e) * std::exp(0.02 * rng.normal()));
            double t = std::exp(0.05 * rng.normal());
            if (munis[i].region == Region::Galilee || munis[i].region == Region::Periphery) t *= 0.85;
            if (munis[i].region == Region::Haredi) t *= 1.2;
            turnout.push_back(t);
        }
        const auto eligible = apportion(eligible_w, kTotals[e - 1].eligible);
        std::vector<double> actual_w(rows.size());
        std::vector<VoteCount> caps(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            actual_w[r] = static_cast<double>(eligible[r]) * turnout[r];
            caps[r] = static_cast<VoteCount>(0.95 * static_cast<double>(eligible[r]));
        }
        const auto actual = apportion_capped(actual_w, caps, kTotals[e - 1].actual);

        std::vector<std::string> lines;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const Municipality& m = munis[rows[r]];
            const auto& profile = kProfiles[static_cast<std::size_t>(m.region)];
            std::array<double, 6> share{};
            double sum = 0.0;
            for (std::size_t b = 0; b < 6; ++b) {
                const double base = b < 5 ? profile[b] : std::max(0.005, 1.0 - std::accumulate(profile.begin(), profile.end(), 0.0));
                share[b] = base * m.lean[b] * std::exp(0.08 * rng.normal());
                sum += share[b];
            }
            std::vector<double> party_w;
            for (const auto& p : parties) {
                const double bloc_share = share[static_cast<std::size_t>(p.bloc)] / sum;
                party_w.push_back(bloc_share * p.weight * std::exp(0.1 * rng.normal()));
            }
            const VoteCount invalid = static_cast<VoteCount>(std::llround(0.008 * static_cast<double>(actual[r])));
            const auto votes = apportion(party_w, actual[r] - invalid);

            std::string name = m.name;
            if (const auto v = variant_of.find(rows[r]); v != variant_of.end() && e >= 4) name = v->second;
            if (name == "Tel Aviv - Yafo") {
                if (e == 1) name = "Tel-Aviv\xe2\x80\x93Yafo";
                else if (e == 2) name = "  TEL AVIV  -  YAFO ";
            }
            if (e == 3) name = replace_all(name, "'", "\xe2\x80\x99");
            std::string line = csv_field(name) + "," + std::to_string(eligible[r]) + "," + std::to_string(actual[r]);
            for (VoteCount v : votes) line += "," + std::to_string(v);
            lines.push_back(std::move(line));
        }
        for (std::size_t i = lines.size(); i > 1; --i) std::swap(lines[i - 1], lines[rng.below(i)]);

        std::string text = "name,eligible,total";
        for (const auto& p : parties) text += std::string(",") + p.symbol;
        text += "\n";
        for (const auto& l : lines) text += l + "\n";
        files["election_" + std::to_string(e) + ".csv"] = text;
    }

    {
        std::string text = "name,district\n";
        for (const auto& m : munis)
            if (m.analysis) text += csv_field(m.name) + "," + m.district + "\n";
        files["districts.csv"] = text;
    }

    {
        ordered_json features = ordered_json::array();
        for (const auto& m : munis) {
            ordered_json coords = ordered_json::array();
            for (const auto& polygon : m.parts) {
                ordered_json rings = ordered_json::array();
                for (const auto& ring : polygon) {
                    ordered_json pts = ordered_json::array();
                    for (const auto& p : ring) pts.push_back({std::round(p[0] * 1e6) / 1e6, std::round(p[1] * 1e6) / 1e6});
                    rings.push_back(std::move(pts));
                }
                coords.push_back(std::move(rings));
            }
            ordered_json geometry;
            if (coords.size() == 1) {
                geometry["type"] = "Polygon";
                geometry["coordinates"] = coords[0];
            } else {
                geometry["type"] = "MultiPolygon";
                geometry["coordinates"] = coords;
            }
            ordered_json f;
            f["type"] = "Feature";
            f["properties"] = {{"name", m.name}, {"district", m.district}};
            f["geometry"] = std::move(geometry);
            features.push_back(std::move(f));
        }
        ordered_json fc;
        fc["type"] = "FeatureCollection";
        fc["features"] = std::move(features);
        files["municipalities.geojson"] = fc.dump() + "\n";
    }
    return files;
}

void write_fixture(const FixtureFiles& files, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, text] : files) {
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write " + (dir / name).string());
        out << text;
    }
}

LatticeFixture planted_lattice(int cols, int rows, int blocks, std::uint64_t seed) {
    if (cols < 1 || rows < 1 || blocks < 1 || blocks > 5 || blocks > cols)
        throw DomainError("lattice needs 1 <= blocks <= min(cols, 5)");
    Rng rng(seed);
    // Band profiles (Right, Haredi, Center, Left, Arab), each distinct in every bloc.
    static constexpr double profiles[5][5] = {{0.30, 0.14, 0.42, 0.11, 0.01},
                                              {0.45, 0.11, 0.30, 0.10, 0.01},
                                              {0.02, 0.01, 0.02, 0.04, 0.90},
                                              {0.20, 0.45, 0.20, 0.05, 0.05},
                                              {0.15, 0.02, 0.25, 0.50, 0.03}};

    const auto id = [](int x, int y) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "cell_%02d_%02d", y, x);
        return std::string(buf);
    };
    const auto band = [&](int x) { return x * blocks / cols; };

    // Per-cell noise is drawn once and repeated in every election, and all
    // cells have the same electorate, so after standardization only the bloc
    // means separate the bands.
    std::vector<std::vector<double>> cell_weights;
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < cols; ++x) {
            std::vector<double> w(5);
            for (std::size_t b = 0; b < 5; ++b) w[b] = profiles[band(x)][b] * std::exp(0.05 * rng.normal());
            cell_weights.push_back(std::move(w));
        }

    LatticeFixture fx;
    fx.mapping = BlocMapping({{"right", Bloc::Right}, {"haredi", Bloc::Haredi}, {"center", Bloc::Center},
                              {"left", Bloc::Left}, {"arab", Bloc::Arab}});
    std::vector<ElectionDataset> datasets;
    for (int e = 1; e <= 5; ++e) {
        std::string text = "name,eligible,total,right,haredi,center,left,arab\n";
        for (int y = 0; y < rows; ++y)
            for (int x = 0; x < cols; ++x) {
                const VoteCount eligible = 10000, total = 6500;
                const auto votes = apportion(cell_weights[static_cast<std::size_t>(y * cols + x)], total);
                text += id(x, y) + "," + std::to_string(eligible) + "," + std::to_string(total);
                for (VoteCount v : votes) text += "," + std::to_string(v);
                text += "\n";
            }
        datasets.push_back(parse_election_file(text, e));
    }
    fx.panel = align_panel(datasets);

    fx.graph = ContiguityGraph(fx.panel.municipality_ids);
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < cols; ++x) {
            const std::size_t u = *fx.graph.index_of(id(x, y));
            if (x + 1 < cols) fx.graph.add_edge(u, *fx.graph.index_of(id(x + 1, y)), EdgeKind::Boundary);
            if (y + 1 < rows) fx.graph.add_edge(u, *fx.graph.index_of(id(x, y + 1)), EdgeKind::Boundary);
        }
    fx.planted.resize(fx.panel.size());
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < cols; ++x) fx.planted[*fx.graph.index_of(id(x, y))] = band(x);
    return fx;
}

}  // namespace cantons
