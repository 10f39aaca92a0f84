#include "jdpp/csv.hpp"
#include "jdpp/errors.hpp"
#include "jdpp/matrix_io.hpp"
#include "support/fixtures.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace jdpp;
using namespace jdpp::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "jdpp_unit_io";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("csv quoting") {
    CHECK(csv::escape("plain") == "plain");
    CHECK(csv::escape("a,b") == "\"a,b\"");
    CHECK(csv::escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv::escape("two\nlines") == "\"two\nlines\"");
    const auto f = csv::parse_row("x,\"a,b\",\"q\"\"q\",");
    REQUIRE(f.size() == 4u);
    CHECK(f[1] == "a,b");
    CHECK(f[2] == "q\"q");
    CHECK(f[3].empty());
    std::ostringstream os;
    csv::write_row(os, {"a", "b,c"});
    CHECK(os.str() == "a,\"b,c\"\r\n");
    CHECK(std::stod(csv::number(0.1)) == 0.1);
}

TEST_CASE("binary matrix round trip") {
    const OperatorMatrix m = whittaker_l(real_params(), 6);
    const fs::path p = scratch("m.bin");
    write_matrix_binary(p.string(), m);
    const OperatorMatrix r = read_matrix_binary(p.string());
    CHECK(r.entries() == m.entries());
    CHECK(r.grid().nodes() == m.grid().nodes());
    CHECK(r.grid().weights() == m.grid().weights());
    CHECK(r.fingerprint() == m.fingerprint());

    std::ifstream in(p, std::ios::binary);
    char magic[8];
    in.read(magic, 8);
    CHECK(std::string(magic, 7) == "JDPPMAT");
    CHECK(fs::file_size(p) == 8 + 4 + 8 + 8 + 12 * 8 * 2 + 144 * 8);
}

TEST_CASE("binary matrix rejects corrupt files") {
    const fs::path p = scratch("bad.bin");
    {
        std::ofstream out(p, std::ios::binary);
        out << "NOTAMATRIX";
    }
    CHECK_THROWS_AS(read_matrix_binary(p.string()), ConfigError);
    const OperatorMatrix m = whittaker_l(real_params(), 3);
    const fs::path t = scratch("trunc.bin");
    write_matrix_binary(t.string(), m);
    fs::resize_file(t, fs::file_size(t) - 8);
    CHECK_THROWS_AS(read_matrix_binary(t.string()), ConfigError);
    CHECK_THROWS_AS(read_matrix_binary(scratch("missing.bin").string()), ConfigError);
}

TEST_CASE("matrix csv export") {
    const OperatorMatrix m = two_point_l(1.0);
    const fs::path p = scratch("m.csv");
    write_matrix_csv(p.string(), m);
    std::ifstream in(p);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    const auto h = csv::parse_row(header);
    REQUIRE(h.size() == 3u);
    CHECK(std::stod(h[1]) == 1.0);
    CHECK(std::stod(h[2]) == -1.0);
    if (!row.empty() && row.back() == '\r') row.pop_back();
    const auto r = csv::parse_row(row);
    CHECK(std::stod(r[2]) == 1.0);
}
