#include "har_audit/cli/manifest.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>
#include <memory>
#include <stdexcept>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

namespace har_audit::cli {

void ArtifactSet::commit(const fs::path& dir) const {
    fs::create_directories(dir);
    std::vector<fs::path> staged;
    try {
        for (const auto& [name, content] : files_) {
            const fs::path tmp = dir / (name + ".partial");
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw std::runtime_error("cannot write " + tmp.string());
            staged.push_back(tmp);
            out << content;
            out.close();
            if (!out) throw std::runtime_error("failed writing " + tmp.string());
        }
    } catch (...) {
        for (const auto& p : staged) fs::remove(p);
        throw;
    }
    for (const auto& [name, content] : files_) fs::rename(dir / (name + ".partial"), dir / name);
}

std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
        throw std::runtime_error("SHA-256 computation failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

void write_manifest(const fs::path& dir) {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto name = entry.path().filename().string();
        if (name == kManifestName || name.ends_with(".partial")) continue;
        names.push_back(name);
    }
    std::sort(names.begin(), names.end());

    nlohmann::ordered_json artifacts = nlohmann::ordered_json::array();
    for (const auto& name : names) {
        std::ifstream in(dir / name, std::ios::binary);
        const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        nlohmann::ordered_json a;
        a["path"] = name;
        a["bytes"] = content.size();
        a["sha256"] = sha256_hex(content);
        artifacts.push_back(a);
    }
    nlohmann::ordered_json doc;
    doc["artifacts"] = artifacts;
    ArtifactSet set;
    set.add(kManifestName, doc.dump(2) + "\n");
    set.commit(dir);
}

}  // namespace har_audit::cli
