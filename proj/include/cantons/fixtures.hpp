#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cantons/geograph.hpp"
#include "cantons/ingest.hpp"

namespace cantons {

// Synthetic inputs with the shape of the real data: 229 municipalities
// present in all five elections, 5 more that only appear in the geography
// and the first three elections, national totals equal to the published
// ones, five planted political regions, a few isolates and an island.

using FixtureFiles = std::map<std::string, std::string>;  // file name -> contents

FixtureFiles synthetic_fixture(std::uint64_t seed = 7);
void write_fixture(const FixtureFiles& files, const std::filesystem::path& dir);

/// Published national totals per election (eligible, actual).
struct NationalTotals {
    VoteCount eligible = 0;
    VoteCount actual = 0;
};
const NationalTotals& national_totals(int election_id);

/// `cols` x `rows` grid of municipalities split into `blocks` vertical bands
/// of distinct political profile. Graph nodes follow the panel order.
struct LatticeFixture {
    AlignedPanel panel;
    BlocMapping mapping;
    ContiguityGraph graph;
    std::vector<int> planted;
};

LatticeFixture planted_lattice(int cols = 6, int rows = 4, int blocks = 3, std::uint64_t seed = 1);

}  // namespace cantons
