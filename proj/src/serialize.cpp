#include "llmvox/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "llmvox/common.hpp"

namespace llmvox::io {

static_assert(std::endian::native == std::endian::little, "serializers assume a little-endian host");

void write_magic(std::ostream& f) { f.write(kMagic, 4); }

void read_magic(std::istream& f, const std::string& path) {
    char m[4] = {};
    f.read(m, 4);
    if (!f || std::memcmp(m, kMagic, 4) != 0) throw std::runtime_error(path + ": bad magic (expected LVX1)");
}

void write_u32le(std::ostream& f, uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); }

uint32_t read_u32le(std::istream& f) {
    uint32_t v = 0;
    f.read(reinterpret_cast<char*>(&v), 4);
    if (!f) throw std::runtime_error("unexpected end of file reading u32");
    return v;
}

void write_f32le(std::ostream& f, const std::vector<float>& v) {
    f.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 4));
}

std::vector<float> read_f32le(std::istream& f, size_t count, const std::string& path) {
    std::vector<float> v(count);
    f.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * 4));
    if (!f) throw std::runtime_error(path + ": unexpected end of file reading f32 data");
    return v;
}

void save_sections(const std::string& path, const std::vector<Section>& sections) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    write_magic(f);
    write_u32le(f, static_cast<uint32_t>(sections.size()));
    for (const auto& s : sections) {
        if (s.name.size() > 0xffff) throw std::runtime_error("section name too long: " + s.name);
        const uint16_t len = static_cast<uint16_t>(s.name.size());
        f.write(reinterpret_cast<const char*>(&len), 2);
        f.write(s.name.data(), len);
        write_u32le(f, s.rows);
        write_u32le(f, s.cols);
        if (s.data.size() != static_cast<size_t>(s.rows) * s.cols)
            throw std::runtime_error("section size mismatch: " + s.name);
        write_f32le(f, s.data);
    }
    if (!f) throw std::runtime_error("short write: " + path);
}

std::vector<Section> load_sections(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    read_magic(f, path);
    const uint32_t count = read_u32le(f);
    std::vector<Section> sections(count);
    for (auto& s : sections) {
        uint16_t len = 0;
        f.read(reinterpret_cast<char*>(&len), 2);
        if (!f) throw std::runtime_error(path + ": truncated section header");
        s.name.resize(len);
        f.read(s.name.data(), len);
        s.rows = read_u32le(f);
        s.cols = read_u32le(f);
        s.data = read_f32le(f, static_cast<size_t>(s.rows) * s.cols, path);
    }
    return sections;
}

std::string kv_to_string(const KvConfig& kv) {
    std::ostringstream out;
    for (const auto& [k, v] : kv) out << k << "=" << v << "\n";
    return out.str();
}

KvConfig kv_from_string(const std::string& text) {
    KvConfig kv;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        size_t e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value, got '" + line + "'");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        size_t vb = val.find_first_not_of(" \t");
        val = vb == std::string::npos ? "" : val.substr(vb);
        kv[key] = val;
    }
    return kv;
}

void save_kv(const std::string& path, const KvConfig& kv) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << kv_to_string(kv);
    if (!f) throw std::runtime_error("short write: " + path);
}

KvConfig load_kv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return kv_from_string(buf.str());
}

uint64_t config_hash(const KvConfig& kv) { return fnv1a64(kv_to_string(kv)); }

void write_meta_sidecar(const std::string& artifact_path, const std::string& artifact_kind,
                        const std::string& command, const KvConfig& config) {
    std::ofstream f(artifact_path + ".meta");
    if (!f) throw std::runtime_error("cannot open for writing: " + artifact_path + ".meta");
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(config_hash(config)));
    f << "artifact=" << artifact_kind << "\n";
    f << "command=" << command << "\n";
    f << "config_hash=" << hash << "\n";
    f << kv_to_string(config);
}

}  // namespace llmvox::io
