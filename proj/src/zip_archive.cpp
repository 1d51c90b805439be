#include "depmig/zip_archive.hpp"

#include "depmig/error.hpp"

#include <zlib.h>

namespace depmig {
namespace {

constexpr std::uint32_t kEndOfCentralDirectory = 0x06054b50;
constexpr std::uint32_t kCentralDirectoryEntry = 0x02014b50;
constexpr std::uint32_t kLocalFileHeader = 0x04034b50;

std::uint16_t u16(std::string_view data, std::size_t at) {
    if (at + 2 > data.size()) {
        throw Error("zip: truncated archive");
    }
    return static_cast<std::uint16_t>(static_cast<unsigned char>(data[at]) |
                                      (static_cast<unsigned char>(data[at + 1]) << 8));
}

std::uint32_t u32(std::string_view data, std::size_t at) {
    return static_cast<std::uint32_t>(u16(data, at)) |
           (static_cast<std::uint32_t>(u16(data, at + 2)) << 16);
}

std::string inflate_raw(std::string_view input, std::uint32_t expected_size) {
    std::string out(expected_size, '\0');
    z_stream stream{};
    if (inflateInit2(&stream, -MAX_WBITS) != Z_OK) {
        throw Error("zip: inflateInit2 failed");
    }
    stream.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(input.data()));
    stream.avail_in = static_cast<uInt>(input.size());
    stream.next_out = reinterpret_cast<Bytef*>(out.data());
    stream.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&stream, Z_FINISH);
    const auto produced = stream.total_out;
    inflateEnd(&stream);
    if (rc != Z_STREAM_END || produced != expected_size) {
        throw Error("zip: corrupt deflate stream");
    }
    return out;
}

} // namespace

ZipArchive::ZipArchive(std::string bytes) : bytes_(std::move(bytes)) {
    const std::string_view data(bytes_);
    if (data.size() < 22) {
        throw Error("zip: archive too small");
    }
    // The end record sits in the last 22 + 65535 (max comment) bytes.
    std::size_t eocd = std::string_view::npos;
    const std::size_t lowest = data.size() > 22 + 65535 ? data.size() - 22 - 65535 : 0;
    for (std::size_t pos = data.size() - 22 + 1; pos-- > lowest;) {
        if (u32(data, pos) == kEndOfCentralDirectory) {
            eocd = pos;
            break;
        }
    }
    if (eocd == std::string_view::npos) {
        throw Error("zip: end of central directory not found");
    }
    const std::uint16_t count = u16(data, eocd + 10);
    const std::uint32_t cd_offset = u32(data, eocd + 16);
    if (cd_offset == 0xFFFFFFFFu || count == 0xFFFF) {
        throw Error("zip: zip64 archives are not supported");
    }

    std::size_t pos = cd_offset;
    entries_.reserve(count);
    for (std::uint16_t i = 0; i < count; ++i) {
        if (u32(data, pos) != kCentralDirectoryEntry) {
            throw Error("zip: bad central directory entry");
        }
        ZipEntry entry;
        const std::uint16_t flags = u16(data, pos + 8);
        entry.method = u16(data, pos + 10);
        entry.crc32 = u32(data, pos + 16);
        entry.compressed_size = u32(data, pos + 20);
        entry.size = u32(data, pos + 24);
        const std::uint16_t name_len = u16(data, pos + 28);
        const std::uint16_t extra_len = u16(data, pos + 30);
        const std::uint16_t comment_len = u16(data, pos + 32);
        entry.local_header_offset = u32(data, pos + 42);
        if (pos + 46 + name_len > data.size()) {
            throw Error("zip: truncated entry name");
        }
        entry.name = std::string(data.substr(pos + 46, name_len));
        if ((flags & 0x1) != 0) {
            throw Error("zip: encrypted entry " + entry.name);
        }
        entries_.push_back(std::move(entry));
        pos += 46 + name_len + extra_len + comment_len;
    }
}

std::string ZipArchive::read(const ZipEntry& entry) const {
    const std::string_view data(bytes_);
    const std::size_t header = entry.local_header_offset;
    if (u32(data, header) != kLocalFileHeader) {
        throw Error("zip: bad local header for " + entry.name);
    }
    const std::size_t start = header + 30 + u16(data, header + 26) + u16(data, header + 28);
    if (start + entry.compressed_size > data.size()) {
        throw Error("zip: truncated data for " + entry.name);
    }
    const auto payload = data.substr(start, entry.compressed_size);
    std::string out;
    switch (entry.method) {
    case 0: out = std::string(payload); break;
    case 8: out = inflate_raw(payload, entry.size); break;
    default: throw Error("zip: unsupported compression method for " + entry.name);
    }
    const auto crc = ::crc32(0L, reinterpret_cast<const Bytef*>(out.data()), static_cast<uInt>(out.size()));
    if (crc != entry.crc32) {
        throw Error("zip: checksum mismatch for " + entry.name);
    }
    return out;
}

} // namespace depmig
