#include "quantmc/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "quantmc/errors.hpp"

namespace quantmc {

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for digest");
    }
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr ||
        EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw IoError("digest initialization failed");
    }
    std::vector<char> buf(64 * 1024);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const std::streamsize got = in.gcount();
        if (got > 0 &&
            EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(got)) !=
                1) {
            EVP_MD_CTX_free(ctx);
            throw IoError("digest update failed");
        }
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw IoError("digest finalization failed");
    }
    EVP_MD_CTX_free(ctx);

    std::string hex(static_cast<std::size_t>(len) * 2, '0');
    static const char* alphabet = "0123456789abcdef";
    for (unsigned int i = 0; i < len; ++i) {
        hex[2 * i] = alphabet[digest[i] >> 4];
        hex[2 * i + 1] = alphabet[digest[i] & 0x0f];
    }
    return hex;
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = config;
    j["input_digests"] = input_digests;
    j["seed"] = seed;
    j["version"] = version;
    return j.dump(2) + "\n";
}

}  // namespace quantmc
