#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "confsd/diffusion.hpp"

namespace confsd {

/// Provenance carried by every dataset file. `graph` is the source string
/// accepted by make_graph, so downstream stages can rebuild the graph.
struct DatasetHeader {
    std::string tool_version = kToolVersion;
    std::string graph;
    std::uint64_t graph_seed = 0;
    std::size_t n_nodes = 0;
    std::uint64_t seed = 0;
    std::string config_hash;
};

struct Dataset {
    DatasetHeader header;
    std::vector<LabeledSample> samples;
};

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string config_hash(std::string_view canonical_text);

// JSON lines: the first line is {"header": {...}}, then one object per sample:
//   {"id":0,"times":[2,3,...],"snapshots":["SIS...",...],"sources":[4,17],
//    "sigma_inf":0.3,"sigma_rec":0.1,"r0":12.5}
// Each snapshot string has one S/I/R character per node. "r0" is null when
// undefined (SI runs).
void write_jsonl(std::ostream& out, const Dataset& data);
Dataset read_jsonl(std::istream& in);

// Compact binary: "CSDB", u32 version, u32 header-json length + bytes,
// u64 record count, then per record u64 id, u32 M, M x i32 times,
// u32 |Y|, |Y| x i32 sources, f64 sigma_inf, f64 sigma_rec, u8 has_r0,
// f64 r0, M x N status bytes (S=0, I=1, R=2). Little-endian throughout.
void write_binary(std::ostream& out, const Dataset& data);
Dataset read_binary(std::istream& in);

/// Format picked by extension: ".bin" is binary, anything else JSON lines.
void save_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset load_dataset(const std::filesystem::path& path);

} // namespace confsd
