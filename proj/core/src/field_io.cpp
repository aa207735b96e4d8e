#include "stiffpme/field_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace stiffpme {

namespace {

std::array<char, 8> to_le_bytes(double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<char, 8> out{};
    for (int b = 0; b < 8; ++b) out[b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
    return out;
}

double from_le_bytes(const std::array<char, 8>& in) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[b])) << (8 * b);
    return std::bit_cast<double>(bits);
}

}  // namespace

void write_spf1(std::ostream& os, const ScalarField& field) {
    const GridSpec& g = field.grid();
    std::ostringstream header;
    header << std::setprecision(17) << "SPF1 " << g.dim() << ' ' << g.nx();
    if (g.dim() == 2) header << ' ' << g.ny();
    header << ' ' << g.h() << ' ' << g.origin().x;
    if (g.dim() == 2) header << ' ' << g.origin().y;
    header << ' ' << field.time() << '\n';
    os << header.str();
    for (double v : field.values()) {
        const auto bytes = to_le_bytes(v);
        os.write(bytes.data(), bytes.size());
    }
    if (!os) throw std::runtime_error("write_spf1: stream failure");
}

void write_spf1(const std::filesystem::path& path, const ScalarField& field) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_spf1: cannot open " + path.string());
    write_spf1(os, field);
}

ScalarField read_spf1(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw InvalidInput("read_spf1: missing header");
    std::istringstream hs(line);
    std::string magic;
    int dim = 0;
    hs >> magic >> dim;
    if (magic != "SPF1") throw InvalidInput("read_spf1: bad magic '" + magic + "'");
    int nx = 0;
    int ny = 1;
    double h = 0.0;
    double ox = 0.0;
    double oy = 0.0;
    double time = 0.0;
    if (dim == 1) {
        hs >> nx >> h >> ox >> time;
    } else if (dim == 2) {
        hs >> nx >> ny >> h >> ox >> oy >> time;
    } else {
        throw InvalidInput("read_spf1: unsupported dimension");
    }
    if (!hs) throw InvalidInput("read_spf1: malformed header");
    GridSpec grid = dim == 1 ? GridSpec::line(nx, h, ox) : GridSpec::plane(nx, ny, h, {ox, oy});
    std::vector<double> values(grid.size());
    std::array<char, 8> buf{};
    for (auto& v : values) {
        if (!is.read(buf.data(), buf.size())) throw InvalidInput("read_spf1: truncated payload");
        v = from_le_bytes(buf);
    }
    return ScalarField(grid, std::move(values), time);
}

ScalarField read_spf1(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidInput("read_spf1: cannot open " + path.string());
    return read_spf1(is);
}

void write_csv(std::ostream& os, const ScalarField& field) {
    const GridSpec& g = field.grid();
    os << std::setprecision(17);
    os << (g.dim() == 1 ? "x,value\n" : "x,y,value\n");
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Vec2 c = g.center(k);
        os << c.x << ',';
        if (g.dim() == 2) os << c.y << ',';
        os << field[k] << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const ScalarField& field) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_csv: cannot open " + path.string());
    write_csv(os, field);
}

}  // namespace stiffpme
