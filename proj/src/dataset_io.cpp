#include "confsd/dataset_io.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace confsd {

using nlohmann::json;

std::string config_hash(std::string_view canonical_text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

json header_json(const DatasetHeader& h) {
    return json{{"format", "confsd-dataset"},
                {"tool_version", h.tool_version},
                {"graph", h.graph},
                {"graph_seed", h.graph_seed},
                {"n_nodes", h.n_nodes},
                {"seed", h.seed},
                {"config_hash", h.config_hash}};
}

DatasetHeader header_from(const json& j) {
    if (!j.is_object() || j.value("format", "") != "confsd-dataset")
        throw ValidationError("dataset header: missing or wrong 'format' field");
    DatasetHeader h;
    try {
        h.tool_version = j.at("tool_version").get<std::string>();
        h.graph = j.at("graph").get<std::string>();
        h.graph_seed = j.at("graph_seed").get<std::uint64_t>();
        h.n_nodes = j.at("n_nodes").get<std::size_t>();
        h.seed = j.at("seed").get<std::uint64_t>();
        h.config_hash = j.at("config_hash").get<std::string>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("dataset header: ") + e.what());
    }
    return h;
}

json sample_json(const LabeledSample& s) {
    const auto& x = s.snapshots;
    json snaps = json::array();
    for (std::size_t j = 0; j < x.num_snapshots(); ++j) {
        std::string col(x.num_nodes(), 'S');
        auto c = x.column(j);
        for (std::size_t v = 0; v < c.size(); ++v) col[v] = status_char(c[v]);
        snaps.push_back(std::move(col));
    }
    return json{{"id", s.id},
                {"times", x.times()},
                {"snapshots", std::move(snaps)},
                {"sources", s.sources},
                {"sigma_inf", s.sigma_inf},
                {"sigma_rec", s.sigma_rec},
                {"r0", s.r0 ? json(*s.r0) : json(nullptr)}};
}

LabeledSample sample_from(const json& j, std::size_t n_nodes, std::size_t line) {
    LabeledSample s;
    try {
        s.id = j.at("id").get<std::uint64_t>();
        auto times = j.at("times").get<std::vector<int>>();
        const auto& snaps = j.at("snapshots");
        if (!snaps.is_array() || snaps.size() != times.size())
            throw ParseError("'snapshots' must hold one string per entry of 'times'", line);
        std::vector<Status> data;
        data.reserve(times.size() * n_nodes);
        for (const auto& col : snaps) {
            const auto& str = col.get_ref<const std::string&>();
            if (str.size() != n_nodes)
                throw ParseError("snapshot string has " + std::to_string(str.size()) + " characters, expected " +
                                     std::to_string(n_nodes),
                                 line);
            for (char c : str) {
                try {
                    data.push_back(status_from_char(c));
                } catch (const ParseError& e) {
                    throw ParseError(e.what(), line);
                }
            }
        }
        s.snapshots = SnapshotMatrix(n_nodes, std::move(times), std::move(data));
        s.sources = j.at("sources").get<std::vector<NodeId>>();
        s.sigma_inf = j.at("sigma_inf").get<double>();
        s.sigma_rec = j.at("sigma_rec").get<double>();
        if (j.contains("r0") && !j.at("r0").is_null()) s.r0 = j.at("r0").get<double>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("sample record: ") + e.what(), line);
    } catch (const ParseError&) {
        throw;
    } catch (const ValidationError& e) {
        throw ParseError(e.what(), line);
    }
    if (s.sources.empty()) throw ParseError("sample record: 'sources' must be non-empty", line);
    std::sort(s.sources.begin(), s.sources.end());
    for (NodeId v : s.sources)
        if (v < 0 || static_cast<std::size_t>(v) >= n_nodes)
            throw ParseError("sample record: source " + std::to_string(v) + " out of range", line);
    return s;
}

// little-endian primitives
template <class T>
void put(std::ostream& out, T value) {
    std::array<unsigned char, sizeof(T)> bytes{};
    std::uint64_t bits = 0;
    if constexpr (std::is_floating_point_v<T>) {
        static_assert(sizeof(T) == 8);
        std::memcpy(&bits, &value, 8);
    } else {
        bits = static_cast<std::uint64_t>(value);
    }
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get(std::istream& in) {
    std::array<unsigned char, sizeof(T)> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
        throw ValidationError("binary dataset truncated");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    if constexpr (std::is_floating_point_v<T>) {
        T value;
        std::memcpy(&value, &bits, 8);
        return value;
    } else {
        return static_cast<T>(bits);
    }
}

constexpr char kMagic[4] = {'C', 'S', 'D', 'B'};
constexpr std::uint32_t kBinaryVersion = 1;

} // namespace

void write_jsonl(std::ostream& out, const Dataset& data) {
    out << json{{"header", header_json(data.header)}}.dump() << '\n';
    for (const auto& s : data.samples) out << sample_json(s).dump() << '\n';
}

Dataset read_jsonl(std::istream& in) {
    Dataset data;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
        }
        if (!have_header) {
            if (!j.contains("header")) throw ParseError("first record must be the dataset header", lineno);
            data.header = header_from(j.at("header"));
            have_header = true;
            continue;
        }
        data.samples.push_back(sample_from(j, data.header.n_nodes, lineno));
    }
    if (!have_header) throw ValidationError("dataset file is empty");
    return data;
}

void write_binary(std::ostream& out, const Dataset& data) {
    out.write(kMagic, 4);
    put<std::uint32_t>(out, kBinaryVersion);
    auto header = header_json(data.header).dump();
    put<std::uint32_t>(out, static_cast<std::uint32_t>(header.size()));
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    put<std::uint64_t>(out, data.samples.size());
    for (const auto& s : data.samples) {
        put<std::uint64_t>(out, s.id);
        put<std::uint32_t>(out, static_cast<std::uint32_t>(s.snapshots.num_snapshots()));
        for (int t : s.snapshots.times()) put<std::int32_t>(out, t);
        put<std::uint32_t>(out, static_cast<std::uint32_t>(s.sources.size()));
        for (NodeId v : s.sources) put<std::int32_t>(out, v);
        put<double>(out, s.sigma_inf);
        put<double>(out, s.sigma_rec);
        put<std::uint8_t>(out, s.r0 ? 1 : 0);
        put<double>(out, s.r0.value_or(0.0));
        for (Status st : s.snapshots.raw()) put<std::uint8_t>(out, static_cast<std::uint8_t>(st));
    }
}

Dataset read_binary(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw ValidationError("not a binary confsd dataset");
    if (get<std::uint32_t>(in) != kBinaryVersion) throw ValidationError("unsupported binary dataset version");
    std::string header(get<std::uint32_t>(in), '\0');
    if (!in.read(header.data(), static_cast<std::streamsize>(header.size())))
        throw ValidationError("binary dataset truncated");
    Dataset data;
    try {
        data.header = header_from(json::parse(header));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("binary dataset header: ") + e.what());
    }
    const std::size_t n = data.header.n_nodes;
    auto count = get<std::uint64_t>(in);
    for (std::uint64_t r = 0; r < count; ++r) {
        LabeledSample s;
        s.id = get<std::uint64_t>(in);
        std::vector<int> times(get<std::uint32_t>(in));
        for (auto& t : times) t = get<std::int32_t>(in);
        s.sources.resize(get<std::uint32_t>(in));
        for (auto& v : s.sources) {
            v = get<std::int32_t>(in);
            if (v < 0 || static_cast<std::size_t>(v) >= n) throw ValidationError("binary dataset: source out of range");
        }
        if (s.sources.empty()) throw ValidationError("binary dataset: empty source set");
        s.sigma_inf = get<double>(in);
        s.sigma_rec = get<double>(in);
        bool has_r0 = get<std::uint8_t>(in) != 0;
        double r0 = get<double>(in);
        if (has_r0) s.r0 = r0;
        std::vector<Status> data_bytes(times.size() * n);
        for (auto& st : data_bytes) {
            auto b = get<std::uint8_t>(in);
            if (b > 2) throw ValidationError("binary dataset: invalid status byte");
            st = static_cast<Status>(b);
        }
        s.snapshots = SnapshotMatrix(n, std::move(times), std::move(data_bytes));
        data.samples.push_back(std::move(s));
    }
    return data;
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
    const bool binary = path.extension() == ".bin";
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw Error("cannot write dataset: " + path.string());
    if (binary)
        write_binary(out, data);
    else
        write_jsonl(out, data);
}

Dataset load_dataset(const std::filesystem::path& path) {
    const bool binary = path.extension() == ".bin";
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw ValidationError("cannot open dataset: " + path.string());
    return binary ? read_binary(in) : read_jsonl(in);
}

} // namespace confsd
