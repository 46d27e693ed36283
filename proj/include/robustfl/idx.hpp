#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>

#include "robustfl/dataset.hpp"

namespace robustfl {

/// Failure while reading an IDX image/label pair.
class IdxError : public std::runtime_error {
public:
  enum class Kind { io, wrong_magic, truncated, dimension_mismatch };

  IdxError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;  // unsigned byte, 3 dims
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;  // unsigned byte, 1 dim

/// Parses in-memory IDX images (rows x cols bytes per item) and labels.
/// Pixels are mapped from [0, 255] to [-1, 1]; n_classes is max label + 1.
LabeledDataset parse_idx(std::span<const std::uint8_t> images,
                         std::span<const std::uint8_t> labels);

LabeledDataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path);

}  // namespace robustfl
