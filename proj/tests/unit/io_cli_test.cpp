#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "sdt/datasets.hpp"
#include "sdt/errors.hpp"
#include "sdt/io.hpp"

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("/tmp/sdt_io_test_" + name) {
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("csv ingestion") {
    {
        TempFile f("plain.csv", "1\n2\n3\n");
        const sdt::Sample s = sdt::ingest_csv(f.path);
        REQUIRE(s.n() == 3);
        CHECK(s.values[0] == 1.0);
        CHECK(s.values[2] == 3.0);
    }
    {
        TempFile f("header.csv", "x\n1.5\n-2.25\n");
        const sdt::Sample s = sdt::ingest_csv(f.path);
        REQUIRE(s.n() == 2);
        CHECK(s.values[0] == 1.5);
        CHECK(s.values[1] == -2.25);
    }
    {
        TempFile f("crlf.csv", "value\r\n10\r\n20\r\n");
        const sdt::Sample s = sdt::ingest_csv(f.path);
        REQUIRE(s.n() == 2);
        CHECK(s.values[1] == 20.0);
    }
    {
        TempFile f("bad.csv", "1\n2\noops\n4\n");
        try {
            sdt::ingest_csv(f.path);
            FAIL("expected an ingestion error");
        } catch (const sdt::IoError& e) {
            CHECK(std::string(e.what()).find("row 3") != std::string::npos);
        }
    }
    {
        TempFile f("empty.csv", "");
        CHECK_THROWS_AS(sdt::ingest_csv(f.path), sdt::IoError);
    }
    {
        TempFile f("only_header.csv", "x\n");
        CHECK_THROWS_AS(sdt::ingest_csv(f.path), sdt::IoError);
    }
    CHECK_THROWS_AS(sdt::ingest_csv("/nonexistent/definitely/missing.csv"), sdt::IoError);
}

TEST_CASE("builtin telephone data") {
    const sdt::Sample s = sdt::telephone_fault_data();
    REQUIRE(s.n() == 14);
    double sum = 0.0;
    for (double v : s.values) sum += v;
    CHECK(sum == doctest::Approx(565.0));
    CHECK(s.values.front() == -988.0);
    CHECK(s.values.back() == 310.0);
    const sdt::Sample b = sdt::builtin_dataset("telephone-fault");
    CHECK(b.values == s.values);
    CHECK_THROWS_AS(sdt::builtin_dataset("nope"), sdt::InvalidArgumentError);
}

TEST_CASE("fnv1a hashing") {
    CHECK(sdt::fnv1a_hash("") == 14695981039346656037ull);
    CHECK(sdt::fnv1a_hash("a") == 0xaf63dc4c8601ec8cull);
    CHECK(sdt::fnv1a_hash("abc") != sdt::fnv1a_hash("acb"));
}

TEST_CASE("metadata header carries version, hash, seed, and conventions") {
    const std::string h = sdt::metadata_header("{\"command\":\"fit\"}", 42);
    CHECK(h.rfind("# sdt ", 0) == 0);
    CHECK(h.find(sdt::kToolVersion) != std::string::npos);
    CHECK(h.find("seed=42") != std::string::npos);
    CHECK(h.find("config=") != std::string::npos);
    CHECK(h.find("conventions=") != std::string::npos);
    // same config, same header; different config, different hash
    CHECK(sdt::metadata_header("{\"command\":\"fit\"}", 42) == h);
    CHECK(sdt::metadata_header("{\"command\":\"test\"}", 42) != h);
}

TEST_CASE("csv rendering") {
    sdt::CsvTable t;
    t.columns = {"a", "b"};
    t.rows.push_back({"1", "2"});
    t.rows.push_back({"3", "4"});
    CHECK(sdt::render_csv("# hdr", t) == "# hdr\na,b\n1,2\n3,4\n");
    t.rows.push_back({"only-one"});
    CHECK_THROWS_AS(sdt::render_csv("# hdr", t), sdt::InvalidArgumentError);
}

TEST_CASE("double formatting is round-trip exact and stable") {
    for (double v : {0.1, 1.0 / 3.0, 123456.789, -2.5e-17, 0.0, 96.564}) {
        const std::string s = sdt::format_double(v);
        CHECK(std::stod(s) == v);
        CHECK(sdt::format_double(v) == s);
    }
    CHECK(sdt::format_double(0.1) == "0.1");
    CHECK(sdt::format_double(2.0) == "2");
}
