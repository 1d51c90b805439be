#include "zip_writer.hpp"

#include <zlib.h>

#include <cstdint>
#include <stdexcept>

namespace depmig::testkit {
namespace {

void put16(std::string& out, std::uint16_t v) {
    out += static_cast<char>(v & 0xff);
    out += static_cast<char>(v >> 8);
}

void put32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

std::string raw_deflate(const std::string& data) {
    z_stream zs{};
    if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
        throw std::runtime_error("deflateInit2 failed");
    }
    std::string out(deflateBound(&zs, static_cast<uLong>(data.size())) + 16, '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&zs, Z_FINISH);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw std::runtime_error("deflate failed");
    out.resize(zs.total_out);
    return out;
}

} // namespace

std::string make_zip(const std::vector<std::pair<std::string, std::string>>& entries, bool deflate) {
    std::string body;
    std::string central;
    for (const auto& [name, data] : entries) {
        const auto crc = static_cast<std::uint32_t>(
            crc32(0, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
        const bool compress = deflate && !data.empty();
        const std::string stored = compress ? raw_deflate(data) : data;
        const std::uint16_t method = compress ? 8 : 0;
        const auto offset = static_cast<std::uint32_t>(body.size());

        put32(body, 0x04034b50);
        put16(body, 20);
        put16(body, 0);
        put16(body, method);
        put16(body, 0);
        put16(body, 0x21);
        put32(body, crc);
        put32(body, static_cast<std::uint32_t>(stored.size()));
        put32(body, static_cast<std::uint32_t>(data.size()));
        put16(body, static_cast<std::uint16_t>(name.size()));
        put16(body, 0);
        body += name;
        body += stored;

        put32(central, 0x02014b50);
        put16(central, 20);
        put16(central, 20);
        put16(central, 0);
        put16(central, method);
        put16(central, 0);
        put16(central, 0x21);
        put32(central, crc);
        put32(central, static_cast<std::uint32_t>(stored.size()));
        put32(central, static_cast<std::uint32_t>(data.size()));
        put16(central, static_cast<std::uint16_t>(name.size()));
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put32(central, 0);
        put32(central, offset);
        central += name;
    }
    std::string out = body + central;
    put32(out, 0x06054b50);
    put16(out, 0);
    put16(out, 0);
    put16(out, static_cast<std::uint16_t>(entries.size()));
    put16(out, static_cast<std::uint16_t>(entries.size()));
    put32(out, static_cast<std::uint32_t>(central.size()));
    put32(out, static_cast<std::uint32_t>(body.size()));
    put16(out, 0);
    return out;
}

} // namespace depmig::testkit
