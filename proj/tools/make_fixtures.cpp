// Regenerates the synthetic data directory committed under fixtures/.
#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "cantons/fixtures.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Write the synthetic fixture data directory"};
    std::string out = "fixtures";
    std::uint64_t seed = 7;
    app.add_option("--out", out, "output directory");
    app.add_option("--seed", seed, "generator seed");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    try {
        cantons::write_fixture(cantons::synthetic_fixture(seed), out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
