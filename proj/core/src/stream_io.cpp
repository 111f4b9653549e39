#include "pencilcrt/stream_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "pencilcrt/error.hpp"

namespace pencilcrt {

namespace {

constexpr std::uint32_t kMaxHeaderBytes = 1u << 20;

[[noreturn]] void io_fail(const std::string& what) { throw Error(ErrorKind::Io, what); }

void put_u32(std::ostream& out, std::uint32_t v) {
    std::array<char, 4> b{};
    for (int i = 0; i < 4; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out.write(b.data(), b.size());
}

void put_f64(std::ostream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((bits >> (8 * i)) & 0xffu);
    out.write(b.data(), b.size());
}

template <std::size_t N>
void get_bytes(std::istream& in, std::array<unsigned char, N>& b, const char* what) {
    in.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(N));
    if (in.gcount() != static_cast<std::streamsize>(N)) io_fail(std::string("truncated stream file: ") + what);
}

std::uint32_t get_u32(std::istream& in) {
    std::array<unsigned char, 4> b{};
    get_bytes(in, b, "header length");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
    return v;
}

double get_f64(std::istream& in) {
    std::array<unsigned char, 8> b{};
    get_bytes(in, b, "samples");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
    return std::bit_cast<double>(v);
}

}  // namespace

void write_stream(std::ostream& out, const SampledStream& stream) {
    nlohmann::json header = {
        {"rate_hz", stream.rate_hz},
        {"n_samples", stream.samples.size()},
        {"start_index", stream.start_index},
    };
    const std::string text = header.dump();
    out.write(kStreamMagic, sizeof kStreamMagic);
    put_u32(out, static_cast<std::uint32_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& s : stream.samples) {
        put_f64(out, s.real());
        put_f64(out, s.imag());
    }
    if (!out) io_fail("failed writing stream");
}

SampledStream read_stream(std::istream& in) {
    std::array<unsigned char, 8> magic{};
    get_bytes(in, magic, "magic");
    if (std::memcmp(magic.data(), kStreamMagic, sizeof kStreamMagic) != 0) io_fail("bad stream magic");

    const std::uint32_t len = get_u32(in);
    if (len == 0 || len > kMaxHeaderBytes) io_fail("implausible stream header length");
    std::string text(len, '\0');
    in.read(text.data(), len);
    if (in.gcount() != static_cast<std::streamsize>(len)) io_fail("truncated stream header");

    SampledStream stream;
    std::uint64_t n = 0;
    try {
        const auto header = nlohmann::json::parse(text);
        if (!header.is_object()) io_fail("stream header is not a JSON object");
        for (const auto& [key, value] : header.items())
            if (key != "rate_hz" && key != "n_samples" && key != "start_index")
                io_fail("unknown stream header key '" + key + "'");
        stream.rate_hz = header.at("rate_hz").get<double>();
        n = header.at("n_samples").get<std::uint64_t>();
        stream.start_index = header.value("start_index", std::int64_t{0});
    } catch (const nlohmann::json::exception& e) {
        io_fail(std::string("malformed stream header: ") + e.what());
    }
    if (!(stream.rate_hz > 0.0) || !std::isfinite(stream.rate_hz)) io_fail("stream rate must be positive");
    if (n == 0) io_fail("stream holds no samples");

    stream.samples.reserve(static_cast<std::size_t>(n));
    for (std::uint64_t i = 0; i < n; ++i) {
        const double re = get_f64(in);
        const double im = get_f64(in);
        stream.samples.emplace_back(re, im);
    }
    if (in.peek() != std::char_traits<char>::eof()) io_fail("trailing bytes after stream samples");
    return stream;
}

void write_stream_file(const std::filesystem::path& path, const SampledStream& stream) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) io_fail("cannot open " + path.string() + " for writing");
    write_stream(out, stream);
    out.close();
    if (!out) io_fail("failed writing " + path.string());
}

SampledStream read_stream_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) io_fail("cannot open " + path.string());
    return read_stream(in);
}

}  // namespace pencilcrt
