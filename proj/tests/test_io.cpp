#include <catch_amalgamated.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "shapedepth/io.hpp"

using namespace shapedepth;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("shapedepth_io_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

}  // namespace

TEST_CASE("dataset csv round trip") {
    TempDir dir;
    DataSet data;
    data.rows.resize(3, 2);
    data.rows << 1.5, -2.25, 0.125, 3.0, -1.0, 0.5;
    data.groups = {"a", "a", "b"};
    save_data_csv(dir.file("d.csv"), data);
    const DataSet back = load_data_csv(dir.file("d.csv"));
    CHECK(back.rows == data.rows);
    CHECK(back.groups == data.groups);
}

TEST_CASE("dataset csv without header or groups") {
    TempDir dir;
    write_file(dir.file("plain.csv"), "1,2\n3,4\n-5,0.5\n");
    const DataSet data = load_data_csv(dir.file("plain.csv"));
    CHECK(data.n() == 3);
    CHECK(data.k() == 2);
    CHECK_FALSE(data.has_groups());
    CHECK(data.rows(2, 1) == 0.5);
}

TEST_CASE("strict csv parsing") {
    TempDir dir;
    write_file(dir.file("nan.csv"), "1,2\nnan,4\n");
    CHECK_THROWS_AS(load_data_csv(dir.file("nan.csv")), parse_error);

    write_file(dir.file("ragged.csv"), "1,2\n3\n");
    CHECK_THROWS_AS(load_data_csv(dir.file("ragged.csv")), parse_error);

    write_file(dir.file("junk.csv"), "1,2\n3,4x\n");
    CHECK_THROWS_AS(load_data_csv(dir.file("junk.csv")), parse_error);

    write_file(dir.file("empty.csv"), "");
    CHECK_THROWS_AS(load_data_csv(dir.file("empty.csv")), parse_error);

    CHECK_THROWS_AS(load_data_csv(dir.file("missing.csv")), parse_error);
}

TEST_CASE("shape json") {
    TempDir dir;
    write_file(dir.file("v.json"), R"({"k": 2, "entries": [[1.6, 0.0], [0.0, 0.4]]})");
    const ShapeMatrix v = load_shape_json(dir.file("v.json"));
    CHECK(v.entries()(0, 0) == 1.6);

    // normalize flag rescales a valid SPD matrix onto the trace-k manifold
    write_file(dir.file("cov.json"), R"({"k": 2, "entries": [[4.0, 0.0], [0.0, 1.0]], "normalize": true})");
    CHECK(load_shape_json(dir.file("cov.json")).entries()(0, 0) == 1.6);

    // without the flag the same matrix is rejected
    write_file(dir.file("raw.json"), R"({"k": 2, "entries": [[4.0, 0.0], [0.0, 1.0]]})");
    CHECK_THROWS_AS(load_shape_json(dir.file("raw.json")), std::domain_error);

    write_file(dir.file("badk.json"), R"({"k": 3, "entries": [[1, 0], [0, 1]]})");
    CHECK_THROWS_AS(load_shape_json(dir.file("badk.json")), parse_error);

    write_file(dir.file("notjson.json"), "{");
    CHECK_THROWS_AS(load_shape_json(dir.file("notjson.json")), parse_error);

    const json j = shape_to_json(v);
    CHECK(shape_from_json(j).entries() == v.entries());
}

TEST_CASE("calibration json round trip") {
    TempDir dir;
    Calibration c;
    c.k = 2;
    c.n = 200;
    c.alpha = 0.05;
    c.t_crit = 0.395;
    c.gamma_rand = 0.61;
    c.replicates = 100000;
    c.seed = 99;
    save_json(dir.file("c.json"), calibration_to_json(c));
    const Calibration back = load_calibration_json(dir.file("c.json"));
    CHECK(back.k == c.k);
    CHECK(back.n == c.n);
    CHECK(back.t_crit == c.t_crit);
    CHECK(back.gamma_rand == c.gamma_rand);
    CHECK(back.replicates == c.replicates);
    CHECK(back.seed == c.seed);
    CHECK(back.t_num() == 79);
}

TEST_CASE("contour csv is row-major over ratio then corr") {
    TempDir dir;
    ContourGrid grid;
    grid.ratio_axis = {0.5, 2.0};
    grid.corr_axis = {-0.1, 0.0, 0.1};
    grid.depth.resize(2, 3);
    grid.depth << 1, 2, 3, 4, 5, 6;
    save_contour_csv(dir.file("g.csv"), grid);
    std::ifstream in(dir.file("g.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "ratio,corr,depth");
    std::getline(in, line);
    CHECK(line == "0.5,-0.1,1");
    std::getline(in, line);
    CHECK(line == "0.5,0,2");
    for (int skip = 0; skip < 2; ++skip) std::getline(in, line);
    std::getline(in, line);
    CHECK(line == "2,0,5");
}

TEST_CASE("file digest pins content") {
    TempDir dir;
    write_file(dir.file("a.txt"), "hello");
    write_file(dir.file("b.txt"), "hello");
    write_file(dir.file("c.txt"), "hello!");
    CHECK(file_digest(dir.file("a.txt")) == file_digest(dir.file("b.txt")));
    CHECK(file_digest(dir.file("a.txt")) != file_digest(dir.file("c.txt")));
    CHECK(file_digest(dir.file("a.txt")).size() == 16);
}
