#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace kandistill {

// Little-endian binary encoding used by the model and dataset containers.

std::uint32_t crc32(std::span<const std::uint8_t> bytes);
std::uint32_t crc32_file(const std::string& path);

class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f32(float v);
    void f64(double v);
    void str(const std::string& s); // u32 length + raw bytes
    void raw(const void* p, std::size_t n);

    const std::vector<std::uint8_t>& bytes() const { return buf_; }

    // Appends a crc32 trailer over everything written so far, then writes
    // the whole buffer to `path`.
    void write_file(const std::string& path) const;

private:
    std::vector<std::uint8_t> buf_;
};

class ByteReader {
public:
    // Loads `path`, verifies the crc32 trailer, exposes the payload.
    static ByteReader from_file(const std::string& path);

    explicit ByteReader(std::vector<std::uint8_t> bytes) : buf_(std::move(bytes)) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    float f32();
    double f64();
    std::string str();
    void raw(void* p, std::size_t n);

    std::size_t remaining() const { return buf_.size() - pos_; }
    bool at_end() const { return pos_ == buf_.size(); }

private:
    void need(std::size_t n) const;

    std::vector<std::uint8_t> buf_;
    std::size_t pos_ = 0;
};

} // namespace kandistill
