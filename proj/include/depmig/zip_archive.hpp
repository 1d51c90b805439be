#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace depmig {

struct ZipEntry {
    std::string name;
    std::uint16_t method = 0;
    std::uint32_t crc32 = 0;
    std::uint32_t compressed_size = 0;
    std::uint32_t size = 0;
    std::uint32_t local_header_offset = 0;

    bool is_directory() const { return !name.empty() && name.back() == '/'; }
};

/// Read-only view of a zip (jar) archive held in memory. Supports stored and deflated
/// entries; zip64 and encrypted archives are rejected.
class ZipArchive {
public:
    /// Throws Error when the bytes are not a readable zip archive.
    explicit ZipArchive(std::string bytes);

    const std::vector<ZipEntry>& entries() const noexcept { return entries_; }
    std::string read(const ZipEntry& entry) const;

private:
    std::string bytes_;
    std::vector<ZipEntry> entries_;
};

} // namespace depmig
