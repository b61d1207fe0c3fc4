#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "gtvtomo/errors.hpp"
#include "gtvtomo/io.hpp"
#include "gtvtomo/phantoms.hpp"

using namespace gtvtomo;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    auto dir = fs::temp_directory_path() / "gtvtomo_test_io";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

} // namespace

TEST_CASE("raw image and sinogram round trip bit for bit") {
    const auto dir = scratch_dir();
    std::mt19937_64 rng(5);
    std::normal_distribution<> gauss(0.0, 1e3);
    for (int trial = 0; trial < 10; ++trial) {
        Image img(3 + trial);
        for (auto& v : img.pixels) v = gauss(rng);
        io::write_raw_image(dir / "x.img", img);
        CHECK(io::read_raw_image(dir / "x.img") == img);

        Sinogram s(2 + trial, 5 + 2 * trial);
        for (auto& v : s.values) v = gauss(rng);
        io::write_sinogram(dir / "x.sino", s);
        const auto back = io::read_sinogram(dir / "x.sino");
        CHECK(back.p == s.p);
        CHECK(back.q == s.q);
        CHECK(back.values == s.values);
    }
}

TEST_CASE("PGM output") {
    const auto dir = scratch_dir();
    const auto img = generate_phantom(PhantomKind::SheppLogan, 16);
    io::write_pgm(dir / "a.pgm", img);
    const auto bytes = slurp(dir / "a.pgm");
    CHECK(bytes.rfind("P5\n16 16\n255\n", 0) == 0);
    CHECK(bytes.size() == std::string("P5\n16 16\n255\n").size() + 256);

    io::write_pgm(dir / "b.pgm", img, 16);
    const auto wide = slurp(dir / "b.pgm");
    CHECK(wide.rfind("P5\n16 16\n65535\n", 0) == 0);
    CHECK(wide.size() == std::string("P5\n16 16\n65535\n").size() + 512);

    CHECK_THROWS_AS(io::write_pgm(dir / "c.pgm", img, 12), std::invalid_argument);
}

TEST_CASE("curve CSV round trip") {
    const auto dir = scratch_dir();
    ErrorCurve c{{3.5, 2.25, 1e-17, 4.0}, "art"};
    io::write_curve_csv(dir / "c.csv", c);
    CHECK(slurp(dir / "c.csv").rfind("iteration,error\n1,", 0) == 0);
    const auto back = io::read_curve_csv(dir / "c.csv");
    CHECK(back.values == c.values);
}

TEST_CASE("malformed files raise IoError") {
    const auto dir = scratch_dir();
    CHECK_THROWS_AS(io::read_raw_image(dir / "missing.img"), IoError);
    spit(dir / "bad.img", "IMAGE 4\n");
    CHECK_THROWS_AS(io::read_raw_image(dir / "bad.img"), IoError);
    spit(dir / "short.img", "IMG 4\nabc");
    CHECK_THROWS_AS(io::read_raw_image(dir / "short.img"), IoError);
    spit(dir / "bad.sino", "SINO 3\n");
    CHECK_THROWS_AS(io::read_sinogram(dir / "bad.sino"), IoError);
    spit(dir / "bad.csv", "iter,err\n1,2\n");
    CHECK_THROWS_AS(io::read_curve_csv(dir / "bad.csv"), IoError);
    spit(dir / "bad2.csv", "iteration,error\n1,abc\n");
    CHECK_THROWS_AS(io::read_curve_csv(dir / "bad2.csv"), IoError);
    CHECK_THROWS_AS(io::write_raw_image(dir / "no_such_dir" / "x.img", Image(2)), IoError);
}
