#include "gtvtomo/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "gtvtomo/errors.hpp"

namespace gtvtomo::io {

namespace {

static_assert(std::endian::native == std::endian::little, "raw float64 formats assume a little-endian host");

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    return in;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

void write_doubles(std::ofstream& out, const std::vector<double>& values) {
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
}

std::vector<double> read_doubles(std::ifstream& in, std::size_t count, const std::filesystem::path& path) {
    std::vector<double> values(count);
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(double))
        throw IoError("truncated payload in " + path.string());
    return values;
}

std::ofstream& precise(std::ofstream& out) {
    out << std::setprecision(17);
    return out;
}

} // namespace

void write_pgm(const std::filesystem::path& path, const Image& img, int bits) {
    if (bits != 8 && bits != 16) throw std::invalid_argument("PGM depth must be 8 or 16 bits");
    const int maxval = bits == 8 ? 255 : 65535;
    const auto [lo, hi] = std::minmax_element(img.pixels.begin(), img.pixels.end());
    const double min = img.pixels.empty() ? 0.0 : *lo;
    const double range = img.pixels.empty() ? 0.0 : *hi - *lo;

    auto out = open_out(path, std::ios::out | std::ios::binary);
    out << "P5\n" << img.n << ' ' << img.n << '\n' << maxval << '\n';
    for (double v : img.pixels) {
        const double unit = range > 0.0 ? (v - min) / range : 0.0;
        const auto level = static_cast<unsigned>(std::lround(unit * maxval));
        if (bits == 8) {
            out.put(static_cast<char>(level));
        } else {
            out.put(static_cast<char>(level >> 8));
            out.put(static_cast<char>(level & 0xff));
        }
    }
    finish(out, path);
}

void write_raw_image(const std::filesystem::path& path, const Image& img) {
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out << "IMG " << img.n << '\n';
    write_doubles(out, img.pixels);
    finish(out, path);
}

Image read_raw_image(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::in | std::ios::binary);
    std::string line;
    std::getline(in, line);
    std::istringstream header(line);
    std::string tag;
    int n = 0;
    if (!(header >> tag >> n) || tag != "IMG" || n < 1) throw IoError("bad IMG header in " + path.string());
    Image img;
    img.n = n;
    img.pixels = read_doubles(in, static_cast<std::size_t>(n) * n, path);
    return img;
}

void write_sinogram(const std::filesystem::path& path, const Sinogram& s) {
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out << "SINO " << s.p << ' ' << s.q << '\n';
    write_doubles(out, s.values);
    finish(out, path);
}

Sinogram read_sinogram(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::in | std::ios::binary);
    std::string line;
    std::getline(in, line);
    std::istringstream header(line);
    std::string tag;
    int p = 0, q = 0;
    if (!(header >> tag >> p >> q) || tag != "SINO" || p < 1 || q < 1)
        throw IoError("bad SINO header in " + path.string());
    return Sinogram(p, q, read_doubles(in, static_cast<std::size_t>(p) * q, path));
}

void write_sinogram_csv(const std::filesystem::path& path, const Sinogram& s) {
    auto out = open_out(path);
    precise(out);
    for (int r = 0; r < s.p; ++r) {
        for (int k = 0; k < s.q; ++k) out << (k ? "," : "") << s.at(r, k);
        out << '\n';
    }
    finish(out, path);
}

void write_curve_csv(const std::filesystem::path& path, const ErrorCurve& curve) {
    auto out = open_out(path);
    precise(out) << "iteration,error\n";
    for (std::size_t k = 0; k < curve.values.size(); ++k) out << k + 1 << ',' << curve.values[k] << '\n';
    finish(out, path);
}

ErrorCurve read_curve_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line != "iteration,error") throw IoError("bad curve header in " + path.string());
    ErrorCurve curve;
    curve.method_label = path.stem().string();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw IoError("bad curve row in " + path.string());
        try {
            curve.values.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw IoError("bad curve value in " + path.string());
        }
    }
    return curve;
}

void write_profile_csv(const std::filesystem::path& path, const IntensityProfile& profile) {
    auto out = open_out(path);
    precise(out) << "column,value\n";
    for (std::size_t c = 0; c < profile.values.size(); ++c) out << c << ',' << profile.values[c] << '\n';
    finish(out, path);
}

void write_edges_csv(const std::filesystem::path& path, const PatchGraph& g) {
    auto out = open_out(path);
    precise(out) << "i,j,weight\n";
    for (const auto& e : g.edges()) out << e.i << ',' << e.j << ',' << e.weight << '\n';
    finish(out, path);
}

void write_trace_csv(const std::filesystem::path& path, const DenoiseTrace& trace) {
    auto out = open_out(path);
    precise(out) << "iteration,objective\n";
    for (std::size_t k = 0; k < trace.objective.size(); ++k) out << k + 1 << ',' << trace.objective[k] << '\n';
    finish(out, path);
}

} // namespace gtvtomo::io
