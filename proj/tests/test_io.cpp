#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "fodg/io.hpp"
#include "test_util.hpp"

using namespace fodg;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("fodg_io_test_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_bytes(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("fvecs single record") {
    TempDir tmp;
    // [dim=2][1.0f][2.0f]
    std::vector<unsigned char> bytes = {0x02, 0, 0, 0};
    float vals[2] = {1.0f, 2.0f};
    auto* p = reinterpret_cast<unsigned char*>(vals);
    bytes.insert(bytes.end(), p, p + 8);
    write_bytes(tmp.file("a.fvecs"), bytes);

    Dataset ds = load_fvecs(tmp.file("a.fvecs"));
    CHECK(ds.size() == 1);
    CHECK(ds.dim() == 2);
    CHECK(ds.row(0)[0] == 1.0f);
    CHECK(ds.row(0)[1] == 2.0f);
}

TEST_CASE("fvecs malformed inputs") {
    TempDir tmp;

    SUBCASE("inconsistent dims") {
        std::vector<unsigned char> bytes = {0x02, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
                                            0x03, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
        write_bytes(tmp.file("bad.fvecs"), bytes);
        CHECK_THROWS_AS(load_fvecs(tmp.file("bad.fvecs")), FormatError);
    }
    SUBCASE("empty file") {
        write_bytes(tmp.file("empty.fvecs"), {});
        CHECK_THROWS_AS(load_fvecs(tmp.file("empty.fvecs")), FormatError);
    }
    SUBCASE("truncated record") {
        std::vector<unsigned char> bytes = {0x02, 0, 0, 0, 0, 0, 0, 0};
        write_bytes(tmp.file("trunc.fvecs"), bytes);
        CHECK_THROWS_AS(load_fvecs(tmp.file("trunc.fvecs")), FormatError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_fvecs(tmp.file("nope.fvecs")), FormatError);
    }
}

TEST_CASE("graph round-trip, smallest valid graph") {
    TempDir tmp;
    Graph g;
    g.num_nodes = 2;
    g.degree = 1;
    g.ids = {1, 0};
    save_graph(g, tmp.file("g.bin"));
    CHECK(std::filesystem::file_size(tmp.file("g.bin")) == 8 + 8 + 4 + 8);
    Graph back = load_graph(tmp.file("g.bin"));
    CHECK(back.num_nodes == 2);
    CHECK(back.degree == 1);
    CHECK(back.ids == g.ids);
}

TEST_CASE("graph format errors") {
    TempDir tmp;

    SUBCASE("bad magic") {
        Graph g{2, 1, {1, 0}};
        save_graph(g, tmp.file("g.bin"));
        std::fstream f(tmp.file("g.bin"), std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(7);
        f.put('X');  // CAGGRAPH -> CAGGRAPX
        f.close();
        CHECK_THROWS_AS(load_graph(tmp.file("g.bin")), FormatError);
    }
    SUBCASE("stored id with MSB set") {
        Graph g{2, 1, {1, 0}};
        save_graph(g, tmp.file("g.bin"));
        std::fstream f(tmp.file("g.bin"), std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(8 + 8 + 4 + 3);  // high byte of first id
        f.put(static_cast<char>(0x80));
        f.close();
        CHECK_THROWS_AS(load_graph(tmp.file("g.bin")), FormatError);
    }
    SUBCASE("id out of range") {
        Graph g{2, 1, {1, 0}};
        save_graph(g, tmp.file("g.bin"));
        std::fstream f(tmp.file("g.bin"), std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(8 + 8 + 4);
        f.put(0x05);
        f.close();
        CHECK_THROWS_AS(load_graph(tmp.file("g.bin")), FormatError);
    }
    SUBCASE("saving an id with the parent flag is refused") {
        Graph g{2, 1, {1 | 0x80000000u, 0}};
        CHECK_THROWS_AS(save_graph(g, tmp.file("g.bin")), FormatError);
    }
}

TEST_CASE("randomized save/load identities") {
    TempDir tmp;
    std::mt19937_64 rng(99);

    for (int round = 0; round < 30; ++round) {
        // Graph round-trip.
        std::uint32_t n = 2 + static_cast<std::uint32_t>(rng() % 40);
        std::uint32_t d = 1 + static_cast<std::uint32_t>(rng() % std::min<std::uint32_t>(n - 1, 8));
        Graph g;
        g.num_nodes = n;
        g.degree = d;
        g.ids.resize(std::size_t(n) * d);
        for (std::uint32_t v = 0; v < n; ++v) {
            // d distinct non-self ids per row
            std::uint32_t written = 0;
            for (std::uint32_t c = 0; written < d; ++c) {
                std::uint32_t id = (v + 1 + c) % n;
                g.ids[std::size_t(v) * d + written++] = id;
            }
        }
        save_graph(g, tmp.file("g.bin"));
        Graph back = load_graph(tmp.file("g.bin"));
        REQUIRE(back.ids == g.ids);

        // fvecs round-trip.
        Dataset ds = testutil::make_uniform_dataset(1 + rng() % 20, 1 + rng() % 10, rng());
        save_fvecs(ds, tmp.file("d.fvecs"));
        Dataset dback = load_fvecs(tmp.file("d.fvecs"));
        REQUIRE(dback.size() == ds.size());
        REQUIRE(dback.dim() == ds.dim());
        for (std::uint32_t i = 0; i < ds.size(); ++i)
            for (std::uint32_t j = 0; j < ds.dim(); ++j)
                REQUIRE(dback.row(i)[j] == ds.row(i)[j]);

        // ivecs round-trip.
        IdMatrix m;
        m.rows = 1 + rng() % 10;
        m.cols = 1 + rng() % 10;
        m.data.resize(std::size_t(m.rows) * m.cols);
        for (auto& v : m.data) v = static_cast<std::int32_t>(rng() % 1000);
        save_ivecs(m, tmp.file("m.ivecs"));
        IdMatrix mb = load_ivecs(tmp.file("m.ivecs"));
        REQUIRE(mb.data == m.data);
    }
}
