#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "hhta/signal.hpp"

namespace hhta {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t le32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put16(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xFF));
    out.push_back(static_cast<unsigned char>(v >> 8));
}

void put32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) out.push_back(static_cast<unsigned char>((v >> s) & 0xFF));
}

void put_tag(std::vector<unsigned char>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

struct FmtChunk {
    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t rate = 0;
    std::uint16_t bits = 0;
};

}  // namespace

Signal read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("read_wav: cannot open " + path.string());
    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                           std::istreambuf_iterator<char>());
    const auto fail = [&](const std::string& why) -> FormatError {
        return FormatError("read_wav: " + path.string() + ": " + why);
    };
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw fail("not a RIFF/WAVE file");
    }

    FmtChunk fmt;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    std::size_t data_size = 0;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* hdr = bytes.data() + pos;
        const std::size_t size = le32(hdr + 4);
        const std::size_t body = pos + 8;
        const std::size_t avail = bytes.size() - body;
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (size < 16 || size > avail) throw fail("truncated fmt chunk");
            const unsigned char* f = bytes.data() + body;
            fmt.format = le16(f);
            fmt.channels = le16(f + 2);
            fmt.rate = le32(f + 4);
            fmt.bits = le16(f + 14);
            if (fmt.format == kFormatExtensible) {
                if (size < 40) throw fail("truncated extensible fmt chunk");
                fmt.format = le16(f + 24);  // first two bytes of the subformat GUID
            }
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            data = bytes.data() + body;
            // Some writers leave the size unset for streamed output.
            data_size = std::min(size, avail);
        }
        pos = body + size + (size & 1);
    }
    if (!have_fmt) throw fail("missing fmt chunk");
    if (data == nullptr) throw fail("missing data chunk");
    if (fmt.channels != 1) {
        throw fail("expected 1 channel, found " + std::to_string(fmt.channels));
    }
    if (fmt.rate == 0 || fmt.rate > static_cast<std::uint32_t>(INT32_MAX)) {
        throw fail("invalid sample rate");
    }

    std::vector<double> samples;
    if (fmt.format == kFormatPcm && fmt.bits == 16) {
        samples.resize(data_size / 2);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto raw = static_cast<std::int16_t>(le16(data + 2 * i));
            samples[i] = static_cast<double>(raw) / 32768.0;
        }
    } else if (fmt.format == kFormatFloat && fmt.bits == 32) {
        samples.resize(data_size / 4);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            samples[i] = static_cast<double>(std::bit_cast<float>(le32(data + 4 * i)));
        }
    } else {
        throw fail("unsupported encoding (format " + std::to_string(fmt.format) + ", " +
                   std::to_string(fmt.bits) + " bits); expected PCM16 or float32");
    }
    return Signal(std::move(samples), static_cast<int>(fmt.rate));
}

void write_wav(const Signal& signal, const std::filesystem::path& path) {
    const auto n = static_cast<std::uint32_t>(signal.size());
    const std::uint32_t data_bytes = n * 4;
    std::vector<unsigned char> out;
    out.reserve(58 + data_bytes);

    put_tag(out, "RIFF");
    put32(out, 4 + (8 + 18) + (8 + 4) + (8 + data_bytes));
    put_tag(out, "WAVE");

    put_tag(out, "fmt ");
    put32(out, 18);
    put16(out, kFormatFloat);
    put16(out, 1);
    put32(out, static_cast<std::uint32_t>(signal.sample_rate()));
    put32(out, static_cast<std::uint32_t>(signal.sample_rate()) * 4);
    put16(out, 4);
    put16(out, 32);
    put16(out, 0);

    put_tag(out, "fact");
    put32(out, 4);
    put32(out, n);

    put_tag(out, "data");
    put32(out, data_bytes);
    for (double v : signal.samples()) {
        const auto f = static_cast<float>(v);
        if (!std::isfinite(f)) throw std::invalid_argument("write_wav: sample exceeds float32 range");
        put32(out, std::bit_cast<std::uint32_t>(f));
    }

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("write_wav: cannot open " + path.string() + " for writing");
    file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!file) throw std::runtime_error("write_wav: failed writing " + path.string());
}

}  // namespace hhta
