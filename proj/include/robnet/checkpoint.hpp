#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "robnet/model.hpp"

namespace robnet {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct TrainMeta {
    std::uint64_t epochs_run = 0;
    double final_train_mse = 0.0;
    double final_val_xi = 0.0;
    std::string dataset_fingerprint;
};

/// Binary layout: magic "SPPC", u32 LE format version, length-prefixed
/// UTF-8 JSON block (model config + training metadata), then for each
/// parameter: length-prefixed name, u32 rank, u32 dims, raw f32 LE data.
/// A CRC-32 of all preceding bytes closes the file.
void save_checkpoint(const std::string& path, SppCnn& model, const TrainMeta& meta);

SppCnn load_checkpoint(const std::string& path, TrainMeta* meta_out = nullptr);

} // namespace robnet
