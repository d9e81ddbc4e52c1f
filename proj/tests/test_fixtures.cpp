#include <doctest.h>

#include "cantons/dataset.hpp"
#include "cantons/fixtures.hpp"
#include "cantons/geograph.hpp"
#include "cantons/partition.hpp"
#include "helpers.hpp"

using namespace cantons;

TEST_CASE("committed fixture matches the generator") {
    const auto files = synthetic_fixture();
    CHECK(files.size() == 9);
    for (const auto& [name, content] : files) {
        INFO(name);
        CHECK(read_text_file(testing::fixture_dir() / name) == content);
    }
}

TEST_CASE("generator is seeded") {
    CHECK(synthetic_fixture(7) == synthetic_fixture(7));
    CHECK(synthetic_fixture(7).at("election_1.csv") != synthetic_fixture(8).at("election_1.csv"));
}

TEST_CASE("planted lattice shape") {
    const auto lat = planted_lattice(6, 4, 3);
    CHECK(lat.panel.size() == 24);
    CHECK(lat.graph.node_count() == 24);
    CHECK(lat.graph.edge_count() == 5 * 4 + 6 * 3);
    CHECK(lat.graph.nodes() == lat.panel.municipality_ids);
    CHECK(lat.planted.size() == 24);
    CHECK(count_labels(lat.planted) == 3);
    CHECK(disconnected_cantons(lat.planted, lat.graph) == 0);
}
