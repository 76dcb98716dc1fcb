#pragma once

// IDX (MNIST) ingestion, fixture writing, and shift augmentation.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include "igl/core.hpp"

namespace igl {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// Images with integer labels. `image_side` is 0 for non-image features.
struct LabeledDataset {
    std::vector<FeatureVector> images;
    std::vector<int> labels;
    std::size_t image_side = 0;

    std::size_t size() const { return images.size(); }
    std::size_t dim() const { return images.empty() ? 0 : images.front().size(); }
};

namespace detail {

inline std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::uint32_t read_be32(const std::vector<std::uint8_t>& buf, std::size_t offset,
                               const std::filesystem::path& path) {
    if (offset + 4 > buf.size())
        throw FormatError(path.string() + ": truncated header at offset " + std::to_string(offset));
    return (std::uint32_t{buf[offset]} << 24) | (std::uint32_t{buf[offset + 1]} << 16) |
           (std::uint32_t{buf[offset + 2]} << 8) | std::uint32_t{buf[offset + 3]};
}

inline void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline void write_all(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace detail

struct IdxImages {
    std::vector<FeatureVector> images;
    std::size_t rows = 0;
    std::size_t cols = 0;
};

/// Parses an IDX3 image file; pixels are scaled to [0, 1] by dividing by 255.
inline IdxImages load_idx_images(const std::filesystem::path& path) {
    const auto buf = detail::read_all(path);
    const auto magic = detail::read_be32(buf, 0, path);
    if (magic != kIdxImageMagic)
        throw FormatError(path.string() + ": bad image magic " + std::to_string(magic) + " at offset 0");
    const std::size_t count = detail::read_be32(buf, 4, path);
    IdxImages out;
    out.rows = detail::read_be32(buf, 8, path);
    out.cols = detail::read_be32(buf, 12, path);
    const std::size_t pixels = out.rows * out.cols;
    const std::size_t need = 16 + count * pixels;
    if (buf.size() < need)
        throw FormatError(path.string() + ": truncated pixel data at offset " + std::to_string(buf.size()) +
                          " (expected " + std::to_string(need) + " bytes)");
    out.images.assign(count, FeatureVector(pixels));
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t p = 0; p < pixels; ++p)
            out.images[i][p] = static_cast<double>(buf[16 + i * pixels + p]) / 255.0;
    return out;
}

inline std::vector<int> load_idx_labels(const std::filesystem::path& path) {
    const auto buf = detail::read_all(path);
    const auto magic = detail::read_be32(buf, 0, path);
    if (magic != kIdxLabelMagic)
        throw FormatError(path.string() + ": bad label magic " + std::to_string(magic) + " at offset 0");
    const std::size_t count = detail::read_be32(buf, 4, path);
    if (buf.size() < 8 + count)
        throw FormatError(path.string() + ": truncated label data at offset " + std::to_string(buf.size()) +
                          " (expected " + std::to_string(8 + count) + " bytes)");
    std::vector<int> labels(count);
    for (std::size_t i = 0; i < count; ++i) labels[i] = buf[8 + i];
    return labels;
}

inline LabeledDataset load_idx(const std::filesystem::path& images_path,
                               const std::filesystem::path& labels_path) {
    auto imgs = load_idx_images(images_path);
    auto labels = load_idx_labels(labels_path);
    if (imgs.images.size() != labels.size())
        throw FormatError("count mismatch: " + images_path.string() + " has " +
                          std::to_string(imgs.images.size()) + " images (offset 4), " +
                          labels_path.string() + " has " + std::to_string(labels.size()) +
                          " labels (offset 4)");
    LabeledDataset ds;
    ds.images = std::move(imgs.images);
    ds.labels = std::move(labels);
    ds.image_side = imgs.rows == imgs.cols ? imgs.rows : 0;
    return ds;
}

inline void write_idx_images(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                             const std::vector<std::vector<std::uint8_t>>& images) {
    std::vector<std::uint8_t> out;
    detail::put_be32(out, kIdxImageMagic);
    detail::put_be32(out, static_cast<std::uint32_t>(images.size()));
    detail::put_be32(out, static_cast<std::uint32_t>(rows));
    detail::put_be32(out, static_cast<std::uint32_t>(cols));
    for (const auto& img : images) {
        if (img.size() != rows * cols) throw DimensionError("write_idx_images: image size mismatch");
        out.insert(out.end(), img.begin(), img.end());
    }
    detail::write_all(path, out);
}

inline void write_idx_labels(const std::filesystem::path& path, const std::vector<std::uint8_t>& labels) {
    std::vector<std::uint8_t> out;
    detail::put_be32(out, kIdxLabelMagic);
    detail::put_be32(out, static_cast<std::uint32_t>(labels.size()));
    out.insert(out.end(), labels.begin(), labels.end());
    detail::write_all(path, out);
}

/// Translates a side x side image by (dx columns, dy rows) with zero padding.
inline FeatureVector shift_image(const FeatureVector& image, std::size_t side, int dx, int dy) {
    if (image.size() != side * side) throw DimensionError("shift_image: image is not side x side");
    FeatureVector out(image.size(), 0.0);
    const int s = static_cast<int>(side);
    for (int r = 0; r < s; ++r) {
        const int tr = r + dy;
        if (tr < 0 || tr >= s) continue;
        for (int c = 0; c < s; ++c) {
            const int tc = c + dx;
            if (tc < 0 || tc >= s) continue;
            out[static_cast<std::size_t>(tr * s + tc)] = image[static_cast<std::size_t>(r * s + c)];
        }
    }
    return out;
}

/// Random integer shift in [-radius, radius]^2; radius 0 returns the input.
inline FeatureVector augment_shift(const FeatureVector& image, RngStream& rng, int radius,
                                   std::size_t side = 28) {
    if (radius < 0) throw ValidationError("augment_shift: radius must be >= 0");
    if (radius == 0) return image;
    const auto span = static_cast<std::uint64_t>(2 * radius + 1);
    const int dx = static_cast<int>(rng.uniform_int(span)) - radius;
    const int dy = static_cast<int>(rng.uniform_int(span)) - radius;
    return shift_image(image, side, dx, dy);
}

}  // namespace igl
