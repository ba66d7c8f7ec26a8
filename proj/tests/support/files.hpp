#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace hhta::testing {

/// Directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("hhta-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    [[nodiscard]] const std::filesystem::path& path() const { return path_; }
    [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

namespace detail {
inline void put_u32(std::ofstream& f, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) f.put(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_u16(std::ofstream& f, std::uint16_t v) {
    f.put(static_cast<char>(v & 0xff));
    f.put(static_cast<char>(v >> 8));
}
}  // namespace detail

/// Writes interleaved 16-bit PCM samples as a canonical WAV file.
inline void write_pcm16(const std::filesystem::path& path, const std::vector<std::int16_t>& samples, int rate,
                        int channels = 1) {
    std::ofstream f(path, std::ios::binary);
    const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
    f.write("RIFF", 4);
    detail::put_u32(f, 36 + data_bytes);
    f.write("WAVEfmt ", 8);
    detail::put_u32(f, 16);
    detail::put_u16(f, 1);
    detail::put_u16(f, static_cast<std::uint16_t>(channels));
    detail::put_u32(f, static_cast<std::uint32_t>(rate));
    detail::put_u32(f, static_cast<std::uint32_t>(rate * channels * 2));
    detail::put_u16(f, static_cast<std::uint16_t>(channels * 2));
    detail::put_u16(f, 16);
    f.write("data", 4);
    detail::put_u32(f, data_bytes);
    for (auto s : samples) detail::put_u16(f, static_cast<std::uint16_t>(s));
}

inline std::string read_bytes(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace hhta::testing
