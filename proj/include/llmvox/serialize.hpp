// Binary container ("LVX1"), key=value config text, and artifact metadata
// sidecars shared by checkpoints, tables and CLI outputs.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace llmvox::io {

inline constexpr char kMagic[4] = {'L', 'V', 'X', '1'};

void write_magic(std::ostream& f);
void read_magic(std::istream& f, const std::string& path);
void write_u32le(std::ostream& f, uint32_t v);
uint32_t read_u32le(std::istream& f);
void write_f32le(std::ostream& f, const std::vector<float>& v);
std::vector<float> read_f32le(std::istream& f, size_t count, const std::string& path);

// Sectioned weight container: magic, u32 section count, then per section a
// u16-length name, u32 rows, u32 cols and row-major f32 LE data.
struct Section {
    std::string name;
    uint32_t rows = 0;
    uint32_t cols = 0;
    std::vector<float> data;
};

void save_sections(const std::string& path, const std::vector<Section>& sections);
std::vector<Section> load_sections(const std::string& path);

// Plain `key=value` text block, '#' comments, stable key order on write.
using KvConfig = std::map<std::string, std::string>;

std::string kv_to_string(const KvConfig& kv);
KvConfig kv_from_string(const std::string& text);
void save_kv(const std::string& path, const KvConfig& kv);
KvConfig load_kv(const std::string& path);

// FNV-1a over the canonical key=value serialization.
uint64_t config_hash(const KvConfig& kv);

// `<artifact>.meta` sidecar recording the seed set and config hash; contains
// no paths or timestamps so equal configurations produce equal sidecars.
void write_meta_sidecar(const std::string& artifact_path, const std::string& artifact_kind,
                        const std::string& command, const KvConfig& config);

}  // namespace llmvox::io
