#include "cantons/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "csv.hpp"
#include "cantons/error.hpp"
#include "cantons/features.hpp"

namespace cantons {

namespace fs = std::filesystem;

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFileError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

std::string with_file(const fs::path& path, const std::string& what) { return path.filename().string() + ": " + what; }

}  // namespace

Dataset load_dataset(const fs::path& dir, const std::optional<fs::path>& geo) {
    if (!fs::is_directory(dir)) throw ValidationError("data directory not found: " + dir.string());
    Dataset data;
    if (const auto aliases = dir / "aliases.csv"; fs::exists(aliases))
        data.normalizer = NameNormalizer::from_alias_text(read_text_file(aliases));
    data.mapping = BlocMapping::from_text(read_text_file(dir / "blocs.csv"));

    for (int id = 1; id <= 5; ++id) {
        const fs::path path = dir / ("election_" + std::to_string(id) + ".csv");
        try {
            data.elections.push_back(parse_election_file(read_text_file(path), id, data.normalizer));
        } catch (const ParseError& e) {
            throw ParseError(with_file(path, e.message()), e.line());
        } catch (const MissingFileError&) {
            throw;
        } catch (const ValidationError& e) {
            throw ValidationError(with_file(path, e.what()));
        }
    }
    data.panel = align_panel(data.elections);

    fs::path geo_path = geo ? *geo : dir / "municipalities.geojson";
    if (geo || fs::exists(geo_path)) data.polygons = parse_geojson_polygons(read_text_file(geo_path), data.normalizer);
    if (const auto districts = dir / "districts.csv"; fs::exists(districts))
        data.districts = parse_districts(read_text_file(districts), data.normalizer);
    return data;
}

AlignedPanel restrict_panel(const AlignedPanel& panel, std::span<const std::string> ids) {
    const std::set<std::string> keep(ids.begin(), ids.end());
    AlignedPanel out;
    out.election_ids = panel.election_ids;
    out.parties = panel.parties;
    std::size_t found = 0;
    for (std::size_t i = 0; i < panel.size(); ++i) {
        if (!keep.count(panel.municipality_ids[i])) continue;
        ++found;
        out.municipality_ids.push_back(panel.municipality_ids[i]);
        out.names.push_back(panel.names[i]);
        out.voter_weight.push_back(panel.voter_weight[i]);
        out.votes.push_back(panel.votes[i]);
        out.eligible.push_back(panel.eligible[i]);
        out.total.push_back(panel.total[i]);
    }
    if (found != keep.size()) throw ValidationError("restriction names municipalities outside the panel");
    return out;
}

PreparedGraph prepare_graph(const AlignedPanel& panel, std::span<const BoundaryPolygon> polygons,
                            const BlocMapping& mapping, const AugmentOptions& options) {
    if (polygons.empty()) throw ValidationError("no boundary polygons loaded");
    PreparedGraph out;
    out.adjacency = build_adjacency(polygons);

    const std::set<std::string> in_panel(panel.municipality_ids.begin(), panel.municipality_ids.end());
    std::vector<std::string> ids;
    for (const auto& id : panel.municipality_ids)
        if (out.adjacency.index_of(id)) ids.push_back(id);
        else out.without_polygon.push_back(id);
    for (const auto& id : out.adjacency.nodes())
        if (!in_panel.count(id)) out.without_votes.push_back(id);
    if (ids.empty()) throw AlignmentError("no panel municipality has a boundary polygon");

    out.panel = out.without_polygon.empty() ? panel : restrict_panel(panel, ids);
    out.subset = subset_graph(out.adjacency, out.panel.municipality_ids);
    const FeatureMatrix features = standardize(bloc_shares_features(out.panel, mapping));
    const auto shares = mean_bloc_shares(out.panel, mapping);
    out.augmented = augment_graph(out.subset, features, shares, options);
    return out;
}

std::map<std::string, std::string> parse_districts(std::string_view text, const NameNormalizer& normalizer) {
    std::map<std::string, std::string> out;
    const auto records = detail::read_csv(text);
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (r == 0 && rec.fields.size() == 2 && rec.fields[0] == "name" && rec.fields[1] == "district") continue;
        if (rec.fields.size() != 2) throw ParseError("district rows need 2 fields", rec.line);
        out[normalizer(rec.fields[0])] = rec.fields[1];
    }
    return out;
}

std::vector<int> district_labels(const AlignedPanel& panel, const std::map<std::string, std::string>& districts) {
    std::map<std::string, int> ids;
    std::vector<int> labels;
    std::vector<std::string> missing;
    for (const auto& id : panel.municipality_ids) {
        const auto it = districts.find(id);
        if (it == districts.end()) {
            missing.push_back(id);
            continue;
        }
        labels.push_back(ids.emplace(it->second, static_cast<int>(ids.size())).first->second);
    }
    if (!missing.empty()) {
        std::string list;
        for (std::size_t i = 0; i < missing.size() && i < 10; ++i) list += (i ? ", " : "") + missing[i];
        throw ValidationError(std::to_string(missing.size()) + " municipalities have no district: " + list);
    }
    return labels;
}

}  // namespace cantons
