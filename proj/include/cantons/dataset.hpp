#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cantons/geograph.hpp"
#include "cantons/ingest.hpp"

namespace cantons {

// A data directory holds
//   election_1.csv .. election_5.csv   vote tables
//   blocs.csv                          party_symbol,bloc
//   aliases.csv       (optional)       variant,canonical
//   municipalities.geojson (optional)  boundaries; --geo may point elsewhere
//   districts.csv     (optional)       name,district

std::string read_text_file(const std::filesystem::path& path);  // throws ValidationError

struct Dataset {
    NameNormalizer normalizer;
    BlocMapping mapping;
    std::vector<ElectionDataset> elections;
    AlignedPanel panel;
    std::vector<BoundaryPolygon> polygons;       // empty without geography
    std::map<std::string, std::string> districts;  // normalized name -> district
};

/// Reads and aligns the election files. Geography is read from `geo` when
/// given, else from the directory when present.
Dataset load_dataset(const std::filesystem::path& dir, const std::optional<std::filesystem::path>& geo = {});

/// Panel restricted to `ids` (which must be a subset, any order); keeps the
/// panel's own ordering.
AlignedPanel restrict_panel(const AlignedPanel& panel, std::span<const std::string> ids);

struct PreparedGraph {
    ContiguityGraph adjacency;   // every polygon
    ContiguityGraph subset;      // panel municipalities with a polygon
    ContiguityGraph augmented;   // connected, panel order
    AlignedPanel panel;          // panel municipalities with a polygon
    std::vector<std::string> without_polygon;
    std::vector<std::string> without_votes;  // polygons outside the panel
};

/// Adjacency over all polygons, subset to the panel, augmented with the
/// standardized BlocShares features.
PreparedGraph prepare_graph(const AlignedPanel& panel, std::span<const BoundaryPolygon> polygons,
                            const BlocMapping& mapping, const AugmentOptions& options = {});

/// District label per panel municipality, numbered by first appearance.
/// Throws ValidationError naming municipalities without a district.
std::vector<int> district_labels(const AlignedPanel& panel, const std::map<std::string, std::string>& districts);

std::map<std::string, std::string> parse_districts(std::string_view text, const NameNormalizer& normalizer);

}  // namespace cantons
