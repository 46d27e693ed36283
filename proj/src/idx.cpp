#include "robustfl/idx.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <vector>

namespace robustfl {

namespace {

class ByteReader {
public:
  ByteReader(std::span<const std::uint8_t> bytes, const char* what)
      : bytes_(bytes), what_(what) {}

  std::uint32_t u32_be() {
    need(4);
    const std::uint32_t v = (std::uint32_t{bytes_[pos_]} << 24) |
                            (std::uint32_t{bytes_[pos_ + 1]} << 16) |
                            (std::uint32_t{bytes_[pos_ + 2]} << 8) |
                            std::uint32_t{bytes_[pos_ + 3]};
    pos_ += 4;
    return v;
  }

  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n)
      throw IdxError(IdxError::Kind::truncated, std::string(what_) + ": truncated file");
  }

  std::span<const std::uint8_t> bytes_;
  const char* what_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IdxError(IdxError::Kind::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

LabeledDataset parse_idx(std::span<const std::uint8_t> images,
                         std::span<const std::uint8_t> labels) {
  ByteReader img(images, "images");
  if (img.u32_be() != kIdxImageMagic)
    throw IdxError(IdxError::Kind::wrong_magic, "images: wrong magic");
  const std::size_t count = img.u32_be();
  const std::size_t rows = img.u32_be();
  const std::size_t cols = img.u32_be();

  ByteReader lab(labels, "labels");
  if (lab.u32_be() != kIdxLabelMagic)
    throw IdxError(IdxError::Kind::wrong_magic, "labels: wrong magic");
  const std::size_t label_count = lab.u32_be();
  if (label_count != count)
    throw IdxError(IdxError::Kind::dimension_mismatch,
                   "images and labels disagree on item count");

  const auto pixels = img.take(count * rows * cols);
  const auto label_bytes = lab.take(count);

  LabeledDataset out;
  out.n_features = rows * cols;
  out.features.assign(pixels.begin(), pixels.end());
  out.labels.assign(label_bytes.begin(), label_bytes.end());
  out.n_classes =
      out.labels.empty() ? 1 : static_cast<std::size_t>(*std::max_element(
                                   out.labels.begin(), out.labels.end())) + 1;
  return normalize(std::move(out), -1.0, 1.0, 0.0, 255.0);
}

LabeledDataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path) {
  const auto images = read_file(images_path);
  const auto labels = read_file(labels_path);
  return parse_idx(images, labels);
}

}  // namespace robustfl
