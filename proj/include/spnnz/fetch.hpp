#pragma once

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <curl/curl.h>
#include <zlib.h>

#include "spnnz/types.hpp"

namespace spnnz {

/// Collection entries are downloaded as <base>/<group>/<name>.tar.gz, a
/// gzipped tar containing <name>/<name>.mtx. The base defaults to the
/// SuiteSparse collection and can be pointed elsewhere (e.g. a local mirror)
/// via SPNNZ_SUITESPARSE_URL.
inline std::string suitesparse_base_url() {
    if (const char* env = std::getenv("SPNNZ_SUITESPARSE_URL")) return env;
    return "https://sparse.tamu.edu/MM";
}

namespace detail {

inline size_t curl_write_to_string(char* data, size_t size, size_t nmemb, void* userdata) {
    auto* out = static_cast<std::string*>(userdata);
    out->append(data, size * nmemb);
    return size * nmemb;
}

} // namespace detail

/// GET the URL into memory; throws fetch_error on transport or HTTP failure.
inline std::string http_get(const std::string& url, long timeout_seconds = 120) {
    CURL* curl = curl_easy_init();
    if (!curl) throw fetch_error("curl initialization failed");
    std::string body;
    char errbuf[CURL_ERROR_SIZE] = {0};
    curl_easy_setopt(curl, CURLOPT_URL, url.c_str());
    curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, detail::curl_write_to_string);
    curl_easy_setopt(curl, CURLOPT_WRITEDATA, &body);
    curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
    curl_easy_setopt(curl, CURLOPT_MAXREDIRS, 8L);
    curl_easy_setopt(curl, CURLOPT_TIMEOUT, timeout_seconds);
    curl_easy_setopt(curl, CURLOPT_CONNECTTIMEOUT, 20L);
    curl_easy_setopt(curl, CURLOPT_ERRORBUFFER, errbuf);
    curl_easy_setopt(curl, CURLOPT_USERAGENT, "spnnz/1.0");
    const CURLcode rc = curl_easy_perform(curl);
    long status = 0;
    curl_easy_getinfo(curl, CURLINFO_RESPONSE_CODE, &status);
    curl_easy_cleanup(curl);
    if (rc != CURLE_OK) {
        throw fetch_error("download failed for " + url + ": " +
                          (errbuf[0] ? errbuf : curl_easy_strerror(rc)));
    }
    if (status >= 400) {
        throw fetch_error("server returned HTTP " + std::to_string(status) + " for " + url);
    }
    return body;
}

/// Inflate a gzip stream; the trailing CRC is verified by zlib.
inline std::string gunzip(std::string_view gz) {
    z_stream strm{};
    if (inflateInit2(&strm, 16 + MAX_WBITS) != Z_OK) {
        throw fetch_error("zlib initialization failed");
    }
    std::string out;
    char buf[1 << 16];
    strm.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(gz.data()));
    strm.avail_in = static_cast<uInt>(gz.size());
    int rc = Z_OK;
    do {
        strm.next_out = reinterpret_cast<Bytef*>(buf);
        strm.avail_out = sizeof(buf);
        rc = inflate(&strm, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&strm);
            throw fetch_error(std::string("gzip decompression failed: ") +
                              (strm.msg ? strm.msg : zError(rc)));
        }
        out.append(buf, sizeof(buf) - strm.avail_out);
    } while (rc != Z_STREAM_END && (strm.avail_in > 0 || strm.avail_out == 0));
    inflateEnd(&strm);
    if (rc != Z_STREAM_END) throw fetch_error("gzip stream truncated");
    return out;
}

/// Extract the first regular file whose path ends with `suffix` from an
/// ustar archive. Handles GNU long-name records; SuiteSparse archives only
/// need plain entries.
inline std::optional<std::string> tar_extract_suffix(std::string_view tar,
                                                     std::string_view suffix) {
    std::size_t pos = 0;
    std::string pending_long_name;
    while (pos + 512 <= tar.size()) {
        const char* header = tar.data() + pos;
        bool all_zero = true;
        for (int i = 0; i < 512 && all_zero; ++i) all_zero = header[i] == 0;
        if (all_zero) break; // end-of-archive marker

        char size_field[13] = {0};
        std::memcpy(size_field, header + 124, 12);
        const unsigned long long size = std::strtoull(size_field, nullptr, 8);
        const char typeflag = header[156];

        std::string name(header, strnlen(header, 100));
        const char* prefix = header + 345;
        const std::size_t prefix_len = strnlen(prefix, 155);
        if (prefix_len > 0) name = std::string(prefix, prefix_len) + "/" + name;
        if (!pending_long_name.empty()) {
            name = pending_long_name;
            pending_long_name.clear();
        }

        pos += 512;
        const std::size_t data_blocks = (size + 511) / 512;
        if (pos + size > tar.size()) throw fetch_error("tar archive truncated");

        if (typeflag == 'L') {
            pending_long_name.assign(tar.data() + pos, size);
            while (!pending_long_name.empty() && pending_long_name.back() == '\0') {
                pending_long_name.pop_back();
            }
        } else if ((typeflag == '0' || typeflag == '\0') && name.size() >= suffix.size() &&
                   name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
            return std::string(tar.substr(pos, size));
        }
        pos += data_blocks * 512;
    }
    return std::nullopt;
}

/// Download (group, name) from the collection into
/// <cache_dir>/<group>/<name>/<name>.mtx, idempotent on cache hit. The file
/// is staged under a temporary name and renamed, so the cache never holds a
/// partial entry.
inline std::filesystem::path fetch_suitesparse(const std::string& group, const std::string& name,
                                               const std::filesystem::path& cache_dir,
                                               const std::string& base_url = suitesparse_base_url()) {
    namespace fs = std::filesystem;
    const fs::path entry_dir = cache_dir / group / name;
    const fs::path target = entry_dir / (name + ".mtx");
    if (fs::exists(target)) return target;

    static std::mutex fetch_mutex;
    std::lock_guard<std::mutex> lock(fetch_mutex);
    if (fs::exists(target)) return target;

    const std::string url = base_url + "/" + group + "/" + name + ".tar.gz";
    const std::string archive = http_get(url);
    const std::string tar = gunzip(archive);
    const auto mtx = tar_extract_suffix(tar, "/" + name + ".mtx");
    if (!mtx) {
        throw fetch_error("archive for " + group + "/" + name + " does not contain " + name +
                          ".mtx");
    }

    fs::create_directories(entry_dir);
    const fs::path staging = entry_dir / (name + ".mtx.part");
    {
        std::ofstream out(staging, std::ios::binary | std::ios::trunc);
        if (!out) throw fetch_error("cannot write " + staging.string());
        out.write(mtx->data(), static_cast<std::streamsize>(mtx->size()));
        if (!out) throw fetch_error("write failed for " + staging.string());
    }
    fs::rename(staging, target);
    return target;
}

} // namespace spnnz
