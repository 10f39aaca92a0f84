#include "jdpp/matrix_io.hpp"

#include "jdpp/csv.hpp"
#include "jdpp/errors.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace jdpp {

namespace {

static_assert(std::endian::native == std::endian::little, "container format assumes little-endian hosts");

constexpr std::array<char, 8> kMagic = {'J', 'D', 'P', 'P', 'M', 'A', 'T', '\0'};

template <class T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw ConfigError("matrix container: truncated file");
    return v;
}

}  // namespace

std::vector<std::string> csv::parse_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r' && c != '\n') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

void write_matrix_binary(const std::string& path, const OperatorMatrix& M) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os.write(kMagic.data(), kMagic.size());
    put(os, kMatrixFormatVersion);
    const Grid& g = M.grid();
    put(os, std::uint64_t(M.size()));
    put(os, std::uint64_t(g.n_plus()));
    os.write(reinterpret_cast<const char*>(g.nodes().data()), std::streamsize(g.size() * sizeof(double)));
    os.write(reinterpret_cast<const char*>(g.weights().data()), std::streamsize(g.size() * sizeof(double)));
    for (Index i = 0; i < M.size(); ++i)
        for (Index j = 0; j < M.size(); ++j) put(os, M.entries()(i, j));
    if (!os) throw ConfigError("write failed for " + path);
}

OperatorMatrix read_matrix_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open " + path);
    std::array<char, 8> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kMagic) throw ConfigError(path + ": not a matrix container (bad magic)");
    const auto version = get<std::uint32_t>(is);
    if (version != kMatrixFormatVersion) throw ConfigError(path + ": unsupported container version");
    const auto n = get<std::uint64_t>(is);
    const auto np = get<std::uint64_t>(is);
    if (np > n) throw ConfigError(path + ": inconsistent grid descriptor");
    std::vector<double> x(n), w(n);
    is.read(reinterpret_cast<char*>(x.data()), std::streamsize(n * sizeof(double)));
    is.read(reinterpret_cast<char*>(w.data()), std::streamsize(n * sizeof(double)));
    if (!is) throw ConfigError(path + ": truncated grid descriptor");
    auto grid = std::make_shared<const Grid>(Grid::from_nodes(x, w));
    if (std::uint64_t(grid->n_plus()) != np || grid->nodes() != x)
        throw ConfigError(path + ": grid descriptor is not in canonical order");
    Eigen::MatrixXd m(static_cast<Index>(n), static_cast<Index>(n));
    for (Index i = 0; i < Index(n); ++i)
        for (Index j = 0; j < Index(n); ++j) m(i, j) = get<double>(is);
    return OperatorMatrix(std::move(grid), std::move(m));
}

void write_matrix_csv(const std::string& path, const OperatorMatrix& M) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    std::vector<std::string> row{"x_i \\ x_j"};
    for (double x : M.grid().nodes()) row.push_back(csv::number(x));
    csv::write_row(os, row);
    for (Index i = 0; i < M.size(); ++i) {
        row.assign(1, csv::number(M.grid().node(i)));
        for (Index j = 0; j < M.size(); ++j) row.push_back(csv::number(M.entries()(i, j)));
        csv::write_row(os, row);
    }
}

}  // namespace jdpp
