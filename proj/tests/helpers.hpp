#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "cantons/fixtures.hpp"

namespace testing {

inline std::filesystem::path fixture_dir() { return CANTONS_FIXTURE_DIR; }

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("cantons_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace testing
