#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "vpshell/io.hpp"

using namespace vpshell;

namespace {

std::string tmp_path(const std::string &name)
{
    return (std::filesystem::temp_directory_path() / name).string();
}

void put(const std::string &path, const std::string &content)
{
    std::ofstream out(path, std::ios::binary);
    out << content;
}

} // namespace

TEST_CASE("format_double round-trips exactly")
{
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 1e300, -0.0, 3.141592653589793,
                     5.6193336478843928e-4}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("ensemble CSV round trip")
{
    Ensemble e;
    e.particles = {{1.0, -400.123456789012345, 1e-7, 2.5e-8},
                   {0.9999999999999999, 3.0, 0.0, 1e-300}};
    e.total_mass = sum_weights(e);
    const std::string path = tmp_path("vpshell_rt.csv");
    write_ensemble_csv(path, e, "unit test");
    const Ensemble back = read_ensemble_csv(path);
    REQUIRE(back.size() == e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        CHECK(back.particles[i].R == e.particles[i].R);
        CHECK(back.particles[i].W == e.particles[i].W);
        CHECK(back.particles[i].L == e.particles[i].L);
        CHECK(back.particles[i].weight == e.particles[i].weight);
    }
    CHECK(back.total_mass == e.total_mass);
    std::remove(path.c_str());
}

TEST_CASE("comment line carries the configuration and is skipped on read")
{
    Ensemble e;
    e.particles = {{1.0, 0.0, 0.0, 1.0}};
    const std::string path = tmp_path("vpshell_comment.csv");
    write_ensemble_csv(path, e, "tool 1.2.3 | args");
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    CHECK(first == "# tool 1.2.3 | args");
    CHECK(read_ensemble_csv(path).size() == 1);
    std::remove(path.c_str());
}

TEST_CASE("malformed ensemble files raise FormatError")
{
    const std::string path = tmp_path("vpshell_bad.csv");
    CHECK_THROWS_AS(read_ensemble_csv(tmp_path("vpshell_missing_file.csv")), FormatError);

    put(path, "r,w,l\n0,1,0,0,1\n");
    CHECK_THROWS_AS(read_ensemble_csv(path), FormatError);

    put(path, "index,R,W,L,weight\n0,1,0,0\n");
    CHECK_THROWS_AS(read_ensemble_csv(path), FormatError);

    put(path, "index,R,W,L,weight\n0,1,0,0,1,9\n");
    CHECK_THROWS_AS(read_ensemble_csv(path), FormatError);

    put(path, "index,R,W,L,weight\n0,1,abc,0,1\n");
    CHECK_THROWS_AS(read_ensemble_csv(path), FormatError);

    put(path, "index,R,W,L,weight\n1,1,0,0,1\n");
    CHECK_THROWS_AS(read_ensemble_csv(path), FormatError);

    put(path, "index,R,W,L,weight\n0,-1,0,0,1\n");
    CHECK_THROWS_AS(read_ensemble_csv(path), FormatError);

    put(path, "index,R,W,L,weight\n0,1,0,0,0\n");
    CHECK_THROWS_AS(read_ensemble_csv(path), FormatError);

    put(path, "index,R,W,L,weight\n");
    CHECK_THROWS_AS(read_ensemble_csv(path), FormatError);
    std::remove(path.c_str());
}

TEST_CASE("series CSV layout")
{
    TimeSeries s;
    s.rows.push_back({0.5, 1.0, 2.0, 0.1, 0.2, 3.0, 4.0, 7.0});
    const std::string path = tmp_path("vpshell_series.csv");
    write_series_csv(path, s, "cfg");
    std::ifstream in(path);
    std::string l1, l2, l3;
    std::getline(in, l1);
    std::getline(in, l2);
    std::getline(in, l3);
    CHECK(l1 == "# cfg");
    CHECK(l2 == "t,sup_rho,sup_field,r_min,r_max,kinetic,field_energy,total_energy");
    CHECK(l3 == "0.5,1,2,0.1,0.2,3,4,7");
    std::remove(path.c_str());
}
