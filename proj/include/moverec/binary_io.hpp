#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>

#include "moverec/error.hpp"
#include "moverec/linalg.hpp"

namespace moverec {

// Little-endian fixed-width encoding; doubles are stored as raw IEEE bits so
// a round trip is bit-exact.
class BinaryWriter {
public:
    void u32(std::uint32_t v) { raw(&v, sizeof v); }
    void u64(std::uint64_t v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }

    void str(std::string_view s) {
        u64(s.size());
        buf_.append(s.data(), s.size());
    }

    void vec(const Vector& v) {
        u64(static_cast<std::uint64_t>(v.size()));
        raw(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
    }

    void mat(const Matrix& m) {
        u64(static_cast<std::uint64_t>(m.rows()));
        u64(static_cast<std::uint64_t>(m.cols()));
        raw(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
    }

    const std::string& bytes() const noexcept { return buf_; }

private:
    void raw(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }

    std::string buf_;
};

class BinaryReader {
public:
    BinaryReader(std::string_view data, std::string source) : data_(data), source_(std::move(source)) {}

    std::uint32_t u32() { return pod<std::uint32_t>(); }
    std::uint64_t u64() { return pod<std::uint64_t>(); }
    double f64() { return pod<double>(); }

    std::string str() {
        std::uint64_t n = length(1);
        std::string s(data_.substr(pos_, n));
        pos_ += n;
        return s;
    }

    Vector vec() {
        std::uint64_t n = length(sizeof(double));
        Vector v(static_cast<Eigen::Index>(n));
        std::memcpy(v.data(), data_.data() + pos_, n * sizeof(double));
        pos_ += n * sizeof(double);
        return v;
    }

    Matrix mat() {
        std::uint64_t rows = u64();
        std::uint64_t cols = u64();
        if (cols != 0 && rows > remaining() / sizeof(double) / cols) corrupt("matrix exceeds file size");
        Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        std::size_t n = rows * cols * sizeof(double);
        need(n);
        std::memcpy(m.data(), data_.data() + pos_, n);
        pos_ += n;
        return m;
    }

    void expect_magic(std::string_view magic, std::uint32_t version) {
        need(magic.size());
        if (data_.substr(pos_, magic.size()) != magic) corrupt("bad magic header");
        pos_ += magic.size();
        std::uint32_t found = u32();
        if (found != version) {
            throw VersionMismatch(source_ + ": format version " + std::to_string(found) + ", expected " +
                                  std::to_string(version));
        }
    }

    bool at_end() const noexcept { return pos_ == data_.size(); }
    std::size_t remaining() const noexcept { return data_.size() - pos_; }

    [[noreturn]] void corrupt(const std::string& why) const {
        throw CorruptFile(source_ + ": " + why);
    }

private:
    template <class T>
    T pod() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }

    std::uint64_t length(std::size_t elem) {
        std::uint64_t n = u64();
        if (n > remaining() / elem) corrupt("truncated payload");
        return n;
    }

    void need(std::size_t n) const {
        if (n > remaining()) corrupt("truncated file");
    }

    std::string_view data_;
    std::string source_;
    std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace moverec
