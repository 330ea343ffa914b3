#include "mtsdvgan/archive.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>

#include "mtsdvgan/error.hpp"

namespace mtsdvgan {
namespace {

constexpr char kMagic[8] = {'M', 'T', 'S', 'D', 'A', 'R', 'C', 'H'};

class Writer {
public:
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        out_.insert(out_.end(), b, b + n);
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32(float f) { u32(std::bit_cast<std::uint32_t>(f)); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    void need(std::size_t n) const {
        if (pos_ + n > in_.size()) throw ValidationError("archive truncated at byte " + std::to_string(pos_));
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    std::string str() {
        const auto n = u32();
        need(n);
        std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    void expect_magic() {
        need(sizeof(kMagic));
        if (std::memcmp(in_.data(), kMagic, sizeof(kMagic)) != 0) throw ValidationError("not an archive (bad magic)");
        pos_ += sizeof(kMagic);
    }
    bool at_end() const noexcept { return pos_ == in_.size(); }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t ArchiveArray::size() const noexcept {
    return std::accumulate(shape.begin(), shape.end(), std::uint64_t{1}, std::multiplies<>());
}

void TensorArchive::set_meta(const std::string& key, std::string value) {
    for (auto& [k, v] : meta_) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    meta_.emplace_back(key, std::move(value));
}

bool TensorArchive::has_meta(const std::string& key) const {
    for (const auto& kv : meta_)
        if (kv.first == key) return true;
    return false;
}

const std::string& TensorArchive::meta(const std::string& key) const {
    for (const auto& kv : meta_)
        if (kv.first == key) return kv.second;
    throw ValidationError("archive is missing metadata key '" + key + "'");
}

void TensorArchive::add(std::string name, std::vector<std::uint64_t> shape, std::span<const double> values) {
    std::vector<float> f(values.begin(), values.end());
    add(std::move(name), std::move(shape), std::move(f));
}

void TensorArchive::add(std::string name, std::vector<std::uint64_t> shape, std::vector<float> values) {
    ArchiveArray a{std::move(name), std::move(shape), std::move(values)};
    if (a.size() != a.data.size())
        throw ValidationError("array '" + a.name + "' shape does not match its element count");
    if (contains(a.name)) throw ValidationError("duplicate array name '" + a.name + "'");
    arrays_.push_back(std::move(a));
}

bool TensorArchive::contains(const std::string& name) const {
    for (const auto& a : arrays_)
        if (a.name == name) return true;
    return false;
}

const ArchiveArray& TensorArchive::get(const std::string& name) const {
    for (const auto& a : arrays_)
        if (a.name == name) return a;
    throw ValidationError("archive is missing array '" + name + "'");
}

std::vector<std::uint8_t> TensorArchive::serialize() const {
    Writer w;
    w.bytes(kMagic, sizeof(kMagic));
    w.u32(version_);
    w.str(kind_);
    w.u32(static_cast<std::uint32_t>(meta_.size()));
    for (const auto& [k, v] : meta_) {
        w.str(k);
        w.str(v);
    }
    w.u32(static_cast<std::uint32_t>(arrays_.size()));
    for (const auto& a : arrays_) {
        w.str(a.name);
        w.u32(static_cast<std::uint32_t>(a.shape.size()));
        for (auto d : a.shape) w.u64(d);
        for (float f : a.data) w.f32(f);
    }
    return w.take();
}

void TensorArchive::save(const std::filesystem::path& path) const {
    const auto bytes = serialize();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

TensorArchive TensorArchive::deserialize(std::span<const std::uint8_t> bytes, const std::string& expected_kind) {
    Reader r(bytes);
    r.expect_magic();
    TensorArchive a;
    a.version_ = r.u32();
    if (a.version_ != kArchiveFormatVersion)
        throw ValidationError("unsupported archive format version " + std::to_string(a.version_));
    a.kind_ = r.str();
    if (!expected_kind.empty() && a.kind_ != expected_kind)
        throw ValidationError("expected a '" + expected_kind + "' archive, got '" + a.kind_ + "'");
    const auto n_meta = r.u32();
    for (std::uint32_t i = 0; i < n_meta; ++i) {
        auto k = r.str();
        auto v = r.str();
        a.meta_.emplace_back(std::move(k), std::move(v));
    }
    const auto n_arrays = r.u32();
    for (std::uint32_t i = 0; i < n_arrays; ++i) {
        ArchiveArray arr;
        arr.name = r.str();
        const auto ndim = r.u32();
        for (std::uint32_t d = 0; d < ndim; ++d) arr.shape.push_back(r.u64());
        const auto n = arr.size();
        r.need(n * 4);
        arr.data.resize(n);
        for (std::uint64_t j = 0; j < n; ++j) arr.data[j] = r.f32();
        a.arrays_.push_back(std::move(arr));
    }
    if (!r.at_end()) throw ValidationError("trailing bytes after archive body");
    return a;
}

TensorArchive TensorArchive::load(const std::filesystem::path& path, const std::string& expected_kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open archive '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return deserialize(bytes, expected_kind);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

}  // namespace mtsdvgan
