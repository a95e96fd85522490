#include "fodg/io.hpp"

#include <array>
#include <cstring>
#include <fstream>

namespace fodg {

namespace {

constexpr char kGraphMagic[8] = {'C', 'A', 'G', 'G', 'R', 'A', 'P', 'H'};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open for reading: " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open for writing: " + path);
    return out;
}

std::uint64_t file_size(std::ifstream& in) {
    in.seekg(0, std::ios::end);
    std::uint64_t size = static_cast<std::uint64_t>(in.tellg());
    in.seekg(0, std::ios::beg);
    return size;
}

// All on-disk integers are little-endian fixed-width; this build targets
// little-endian hosts, so plain byte copies suffice.
template <typename T>
void read_raw(std::ifstream& in, T* dst, std::size_t count, const std::string& path) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(count * sizeof(T)));
    if (!in) throw FormatError("truncated file: " + path);
}

template <typename T>
void write_raw(std::ofstream& out, const T* src, std::size_t count) {
    out.write(reinterpret_cast<const char*>(src), static_cast<std::streamsize>(count * sizeof(T)));
}

// Shared .Xvecs reader: repeated [i32 dim][dim * 4-byte components].
template <typename Component>
std::pair<std::uint32_t, std::vector<Component>> load_vecs(const std::string& path) {
    std::ifstream in = open_input(path);
    std::uint64_t size = file_size(in);
    if (size == 0) throw FormatError("empty vecs file: " + path);

    std::int32_t dim = 0;
    read_raw(in, &dim, 1, path);
    if (dim <= 0) throw FormatError("non-positive record dimension in " + path);
    std::uint64_t record_bytes = 4 + 4ull * static_cast<std::uint32_t>(dim);
    if (size % record_bytes != 0)
        throw FormatError("file length is not a multiple of the record size: " + path);
    std::uint64_t n = size / record_bytes;

    std::vector<Component> data(n * static_cast<std::uint64_t>(dim));
    in.seekg(0, std::ios::beg);
    for (std::uint64_t i = 0; i < n; ++i) {
        std::int32_t rec_dim = 0;
        read_raw(in, &rec_dim, 1, path);
        if (rec_dim != dim)
            throw FormatError("inconsistent record dimension in " + path);
        read_raw(in, data.data() + i * static_cast<std::uint64_t>(dim),
                 static_cast<std::size_t>(dim), path);
    }
    return {static_cast<std::uint32_t>(dim), std::move(data)};
}

}  // namespace

Dataset load_fvecs(const std::string& path) {
    auto [dim, data] = load_vecs<float>(path);
    try {
        return Dataset(dim, std::move(data));
    } catch (const UsageError& e) {
        throw FormatError(std::string(e.what()) + " (" + path + ")");
    }
}

IdMatrix load_ivecs(const std::string& path) {
    auto [dim, data] = load_vecs<std::int32_t>(path);
    IdMatrix m;
    m.cols = dim;
    m.rows = static_cast<std::uint32_t>(data.size() / dim);
    m.data = std::move(data);
    return m;
}

void save_fvecs(const Dataset& ds, const std::string& path) {
    std::ofstream out = open_output(path);
    std::int32_t dim = static_cast<std::int32_t>(ds.dim());
    for (std::uint32_t i = 0; i < ds.size(); ++i) {
        write_raw(out, &dim, 1);
        write_raw(out, ds.row(i).data(), ds.dim());
    }
    if (!out) throw FormatError("write failed: " + path);
}

void save_ivecs(const IdMatrix& m, const std::string& path) {
    std::ofstream out = open_output(path);
    std::int32_t dim = static_cast<std::int32_t>(m.cols);
    for (std::uint32_t i = 0; i < m.rows; ++i) {
        write_raw(out, &dim, 1);
        write_raw(out, m.row(i).data(), m.cols);
    }
    if (!out) throw FormatError("write failed: " + path);
}

void validate_graph(const Graph& g) {
    if (g.num_nodes == 0 || g.degree == 0) throw FormatError("graph: empty");
    if (g.ids.size() != static_cast<std::size_t>(g.num_nodes) * g.degree)
        throw FormatError("graph: payload size mismatch");
    for (std::uint32_t v = 0; v < g.num_nodes; ++v) {
        auto row = g.row(v);
        for (std::uint32_t j = 0; j < g.degree; ++j) {
            std::uint32_t id = row[j];
            if (has_parent_flag(id)) throw FormatError("graph: id with MSB set");
            if (id >= g.num_nodes) throw FormatError("graph: id out of range");
            if (id == v) throw FormatError("graph: self loop");
            for (std::uint32_t i = 0; i < j; ++i)
                if (row[i] == id) throw FormatError("graph: duplicate id in row");
        }
    }
}

void save_graph(const Graph& g, const std::string& path) {
    for (std::uint32_t id : g.ids) {
        if (has_parent_flag(id)) throw FormatError("save_graph: id with MSB set");
        if (id >= g.num_nodes) throw FormatError("save_graph: id out of range");
    }
    std::ofstream out = open_output(path);
    out.write(kGraphMagic, sizeof(kGraphMagic));
    std::uint64_t n = g.num_nodes;
    std::uint32_t d = g.degree;
    write_raw(out, &n, 1);
    write_raw(out, &d, 1);
    write_raw(out, g.ids.data(), g.ids.size());
    if (!out) throw FormatError("write failed: " + path);
}

Graph load_graph(const std::string& path) {
    std::ifstream in = open_input(path);
    std::uint64_t size = file_size(in);

    std::array<char, 8> magic{};
    read_raw(in, magic.data(), magic.size(), path);
    if (std::memcmp(magic.data(), kGraphMagic, sizeof(kGraphMagic)) != 0)
        throw FormatError("bad graph magic in " + path);

    std::uint64_t n = 0;
    std::uint32_t d = 0;
    read_raw(in, &n, 1, path);
    read_raw(in, &d, 1, path);
    if (n == 0 || n > kMaxNodes || d == 0) throw FormatError("bad graph header in " + path);
    // Header-derived allocation is bounded by the actual file length.
    std::uint64_t expected = 8 + 8 + 4 + n * static_cast<std::uint64_t>(d) * 4;
    if (size != expected) throw FormatError("graph payload size mismatch in " + path);

    Graph g;
    g.num_nodes = static_cast<std::uint32_t>(n);
    g.degree = d;
    g.ids.resize(n * static_cast<std::uint64_t>(d));
    read_raw(in, g.ids.data(), g.ids.size(), path);
    for (std::uint32_t id : g.ids) {
        if (has_parent_flag(id)) throw FormatError("graph id with MSB set in " + path);
        if (id >= g.num_nodes) throw FormatError("graph id out of range in " + path);
    }
    return g;
}

}  // namespace fodg
