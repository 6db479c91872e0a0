#pragma once

// Chain persistence.
//
// chain.csv   header row of parameter names, then one row per stored draw;
//             values in shortest round-trip decimal form, constrained
//             baseline columns written as literal 0.
// chain.json  metadata sidecar: format tag and version, seed and chain
//             index, full model config (schedule included), centering
//             constants, level orderings, kernel backend, engine version.

#include "xcmix/sampler.hpp"

#include <filesystem>

#include <json.hpp>

namespace xcmix {

inline constexpr int kChainFormatVersion = 1;
inline constexpr const char* kEngineVersion = "0.1.0";

nlohmann::json chain_metadata_json(const ChainOutput& chain);

void write_chain(const ChainOutput& chain, const std::filesystem::path& csv_path,
                 const std::filesystem::path& json_path);

// Throws InputError on missing files, malformed content, or a CSV whose
// columns disagree with the sidecar.
ChainOutput read_chain(const std::filesystem::path& csv_path, const std::filesystem::path& json_path);

} // namespace xcmix
