#pragma once

#include "tarlev/error.hpp"
#include "tarlev/io/csv.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace tarlev::io {

inline std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
        throw Error(ErrorCode::Io, "SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

struct ManifestEntry {
    std::string path;  // relative to the output directory
    std::uintmax_t bytes = 0;
    std::string sha256;
};

/// Writes outputs in call order and records their hashes; the manifest itself goes last.
class OutputWriter {
public:
    explicit OutputWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw Error(ErrorCode::Io, "cannot create output directory '" + dir_.string() + "': " + ec.message());
    }

    void write(const std::string& name, const std::string& content) {
        write_file((dir_ / name).string(), content);
        entries_.push_back({name, content.size(), sha256_hex(content)});
    }

    void write_json(const std::string& name, const nlohmann::json& j) { write(name, j.dump(2) + "\n"); }

    [[nodiscard]] const std::vector<ManifestEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] const std::filesystem::path& directory() const noexcept { return dir_; }

    nlohmann::json finish(nlohmann::json header) {
        nlohmann::json files = nlohmann::json::array();
        for (const auto& e : entries_) files.push_back({{"path", e.path}, {"bytes", e.bytes}, {"sha256", e.sha256}});
        header["files"] = files;
        write_file((dir_ / "manifest.json").string(), header.dump(2) + "\n");
        return header;
    }

private:
    std::filesystem::path dir_;
    std::vector<ManifestEntry> entries_;
};

}  // namespace tarlev::io
