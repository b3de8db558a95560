#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rumorsim/engine.hpp"

namespace rumorsim {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/*!
 * A full simulation snapshot.
 *
 * On disk: the magic "RSIMCKPT", then little-endian fields in a fixed order,
 * then the FNV-1a 64 checksum of every preceding byte. Random streams are
 * counter-based, so the master seed and the step index are the whole RNG state.
 */
struct Checkpoint {
    std::uint32_t version = kCheckpointVersion;
    std::uint64_t config_hash = 0;
    std::string config_json;  ///< the configuration the state was produced under
    SimulationState state;
};

std::vector<unsigned char> encode_checkpoint(Checkpoint const& checkpoint);
/// Throws CheckpointError on bad magic, unsupported version, checksum mismatch or truncation.
Checkpoint decode_checkpoint(std::span<unsigned char const> bytes);

void save_checkpoint(Checkpoint const& checkpoint, std::filesystem::path const& path);
Checkpoint load_checkpoint(std::filesystem::path const& path);

}  // namespace rumorsim
