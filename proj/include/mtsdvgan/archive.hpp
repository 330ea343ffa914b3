#pragma once

// Binary archive of named float32 arrays.
//
// Layout (all integers little-endian):
//   magic        8 bytes  "MTSDARCH"
//   version      u32      kArchiveFormatVersion
//   kind         u32 len + bytes   (e.g. "checkpoint", "preprocess", "windows")
//   meta count   u32
//     key        u32 len + bytes
//     value      u32 len + bytes
//   array count  u32
//     name       u32 len + bytes
//     ndim       u32
//     dims       ndim x u64
//     data       prod(dims) x f32, row-major

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mtsdvgan {

inline constexpr std::uint32_t kArchiveFormatVersion = 1;

struct ArchiveArray {
    std::string name;
    std::vector<std::uint64_t> shape;
    std::vector<float> data;

    std::uint64_t size() const noexcept;
};

class TensorArchive {
public:
    TensorArchive() = default;
    explicit TensorArchive(std::string kind) : kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }
    std::uint32_t format_version() const noexcept { return version_; }

    void set_meta(const std::string& key, std::string value);
    bool has_meta(const std::string& key) const;
    const std::string& meta(const std::string& key) const;
    const std::vector<std::pair<std::string, std::string>>& all_meta() const noexcept { return meta_; }

    /// Adds an array; `values` are converted to float32 in row-major order.
    void add(std::string name, std::vector<std::uint64_t> shape, std::span<const double> values);
    void add(std::string name, std::vector<std::uint64_t> shape, std::vector<float> values);

    bool contains(const std::string& name) const;
    const ArchiveArray& get(const std::string& name) const;
    const std::vector<ArchiveArray>& arrays() const noexcept { return arrays_; }

    void save(const std::filesystem::path& path) const;
    std::vector<std::uint8_t> serialize() const;

    /// Loads and validates an archive. `expected_kind` empty means any.
    static TensorArchive load(const std::filesystem::path& path, const std::string& expected_kind = {});
    static TensorArchive deserialize(std::span<const std::uint8_t> bytes, const std::string& expected_kind = {});

private:
    std::string kind_;
    std::uint32_t version_ = kArchiveFormatVersion;
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<ArchiveArray> arrays_;
};

}  // namespace mtsdvgan
