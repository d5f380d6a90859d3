#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gfr/io.hpp"
#include "gfr/synth.hpp"

using namespace gfr;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

std::vector<unsigned char> slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::vector<unsigned char>(std::istreambuf_iterator<char>(in),
                                      std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("GFR1 round trip preserves every component bit-exactly") {
    const TorusGrid g(2, 16, 1.0);
    const VectorField v = synth::random_bandlimited_vector(g, 4, 1001);
    const auto path = temp_file("gfr_test_vec.gfr");
    io::write_gfr1(path.string(), v);

    const io::Gfr1Data data = io::read_gfr1(path.string());
    CHECK(data.dim == 2);
    CHECK(data.n == 16);
    REQUIRE(data.components.size() == 2);
    for (int c = 0; c < 2; ++c) {
        for (std::size_t m = 0; m < g.size(); ++m) {
            CHECK(data.components[c][m] == v.comp[c][m]);
        }
    }
    std::filesystem::remove(path);
}

TEST_CASE("GFR1 header layout is pinned: magic then little-endian u32 triple") {
    const TorusGrid g(1, 8, 1.0);
    ScalarField f(g);
    f.values[0] = 1.0;
    const auto path = temp_file("gfr_test_header.gfr");
    io::write_gfr1(path.string(), f);

    const std::vector<unsigned char> bytes = slurp(path);
    REQUIRE(bytes.size() == 4 + 12 + 8 * 8);
    CHECK(bytes[0] == 'G');
    CHECK(bytes[1] == 'F');
    CHECK(bytes[2] == 'R');
    CHECK(bytes[3] == '1');
    CHECK(bytes[4] == 1); // dim = 1, little-endian
    CHECK(bytes[5] == 0);
    CHECK(bytes[8] == 8); // n = 8
    CHECK(bytes[12] == 1); // one component
    // 1.0 as little-endian IEEE 754: 00 00 00 00 00 00 f0 3f
    CHECK(bytes[16 + 6] == 0xf0);
    CHECK(bytes[16 + 7] == 0x3f);
    std::filesystem::remove(path);
}

TEST_CASE("GFR1 rejects bad magic and truncation") {
    const auto path = temp_file("gfr_test_bad.gfr");
    {
        std::ofstream out(path, std::ios::binary);
        out << "NOPE";
    }
    CHECK_THROWS_AS(io::read_gfr1(path.string()), std::runtime_error);
    {
        std::ofstream out(path, std::ios::binary);
        out << "GFR1";
        const unsigned char header[12] = {2, 0, 0, 0, 16, 0, 0, 0, 1, 0, 0, 0};
        out.write(reinterpret_cast<const char*>(header), 12);
        // payload missing
    }
    CHECK_THROWS_AS(io::read_gfr1(path.string()), std::runtime_error);
    std::filesystem::remove(path);
}

TEST_CASE("PGM: P2 with comments, P5 binary, 16-bit, quantization round trip") {
    const auto p2_path = temp_file("gfr_test.p2.pgm");
    {
        std::ofstream out(p2_path);
        out << "P2\n# a comment\n2 2\n255\n0 128\n# another\n255 64\n";
    }
    const io::PgmImage p2 = io::read_pgm(p2_path.string());
    CHECK(p2.width == 2);
    CHECK(p2.height == 2);
    CHECK(p2.pixels[0] == 0.0);
    CHECK(p2.pixels[1] == doctest::Approx(128.0 / 255.0).epsilon(1e-15));
    CHECK(p2.pixels[3] == doctest::Approx(64.0 / 255.0).epsilon(1e-15));

    io::PgmImage img;
    img.width = 3;
    img.height = 2;
    img.pixels = {0.0, 0.25, 0.5, 0.75, 1.0, 1.5}; // last clamps to 1
    const auto p5_path = temp_file("gfr_test.p5.pgm");
    io::write_pgm(p5_path.string(), img);
    const io::PgmImage back = io::read_pgm(p5_path.string());
    CHECK(back.width == 3);
    CHECK(back.height == 2);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(std::abs(back.pixels[k] - img.pixels[k]) <= 0.5 / 255.0);
    }
    CHECK(back.pixels[5] == 1.0);

    // 16-bit P5: big-endian sample order
    const auto p5w_path = temp_file("gfr_test.p5w.pgm");
    {
        std::ofstream out(p5w_path, std::ios::binary);
        out << "P5\n1 1\n65535\n";
        const unsigned char sample[2] = {0x80, 0x00}; // 32768
        out.write(reinterpret_cast<const char*>(sample), 2);
    }
    const io::PgmImage wide = io::read_pgm(p5w_path.string());
    CHECK(wide.pixels[0] == doctest::Approx(32768.0 / 65535.0).epsilon(1e-12));

    std::filesystem::remove(p2_path);
    std::filesystem::remove(p5_path);
    std::filesystem::remove(p5w_path);
}

TEST_CASE("PGM rejects malformed input with a diagnostic") {
    const auto path = temp_file("gfr_test_badpgm.pgm");
    {
        std::ofstream out(path);
        out << "P6\n2 2\n255\n";
    }
    CHECK_THROWS_WITH_AS(io::read_pgm(path.string()),
                         doctest::Contains("not a P2/P5"), std::runtime_error);
    {
        std::ofstream out(path);
        out << "P5\n4 4\n255\nxx";
    }
    CHECK_THROWS_WITH_AS(io::read_pgm(path.string()), doctest::Contains("truncated"),
                         std::runtime_error);
    {
        std::ofstream out(path);
        out << "P2\n1 1\n255\n900\n";
    }
    CHECK_THROWS_AS(io::read_pgm(path.string()), std::runtime_error);
    CHECK_THROWS_AS(io::read_pgm("/nonexistent/nowhere.pgm"), std::runtime_error);
    std::filesystem::remove(path);
}

TEST_CASE("trace CSV: pinned header and deterministic bytes") {
    std::vector<TraceRecord> trace(2);
    trace[1].step = 1;
    trace[1].t = 0.125;
    trace[1].energy_total = 1.0 / 3.0;
    trace[1].path_length_a = 1e-17;

    const auto p1 = temp_file("gfr_trace1.csv");
    const auto p2 = temp_file("gfr_trace2.csv");
    io::write_trace_csv(p1.string(), trace);
    io::write_trace_csv(p2.string(), trace);
    const auto b1 = slurp(p1);
    CHECK(b1 == slurp(p2));

    std::ifstream in(p1);
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "step,t,E,E_match,E_reg,v_norm_A,dt,min_det_jac,inverse_defect,path_length_A");
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("key=value files: round trip, comments, duplicate override, errors") {
    io::KeyValueFile kv;
    kv.set("alpha", 0.05);
    kv.set("grid", static_cast<long long>(64));
    kv.set("template", "a b.pgm");
    kv.set("alpha", 0.07); // overrides in place

    const auto path = temp_file("gfr_test_manifest.txt");
    io::write_key_value(path.string(), kv);
    const io::KeyValueFile back = io::read_key_value(path.string());
    REQUIRE(back.find("alpha") != nullptr);
    CHECK(*back.find("alpha") == io::format_double(0.07));
    CHECK(*back.find("template") == "a b.pgm");
    CHECK(back.find("missing") == nullptr);

    {
        std::ofstream out(path);
        out << "# comment\n  \nkey = spaced value \n";
    }
    const io::KeyValueFile spaced = io::read_key_value(path.string());
    CHECK(*spaced.find("key") == "spaced value");

    {
        std::ofstream out(path);
        out << "no equals sign here\n";
    }
    CHECK_THROWS_AS(io::read_key_value(path.string()), std::runtime_error);
    std::filesystem::remove(path);
}
