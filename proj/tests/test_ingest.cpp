#include "doctest.h"

#include "cgmap/error.hpp"
#include "cgmap/ingest.hpp"
#include "support.hpp"

using namespace cgmap;
using cgmap::test::TempDir;
using cgmap::test::fixture;
using cgmap::test::write_file;

namespace {

std::string report_with_groups(std::size_t n) {
    nlohmann::json groups = nlohmann::json::array();
    for (std::size_t i = 0; i < n; ++i) {
        groups.push_back({{"index", i},
                          {"fragments",
                           {{{"file", "a.c"}, {"start_line", 1}, {"end_line", 2}},
                            {{"file", "b.c"}, {"start_line", 3 + i}, {"end_line", 4 + i}}}}});
    }
    return nlohmann::json{{"version", "2.2.3"}, {"groups", groups}}.dump();
}

}  // namespace

TEST_CASE("parse_clone_report keeps group count and order") {
    const auto snap = parse_clone_report(report_with_groups(20), ReportFormat::json, {}, {});
    CHECK(snap.version_id == "2.2.3");
    REQUIRE(snap.groups.size() == 20);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(snap.groups[i].index == i);
        CHECK(snap.groups[i].fragments[1].start_line == 3 + i);
    }
}

TEST_CASE("zero groups gives an empty snapshot") {
    const auto snap = parse_clone_report(R"({"version":"1.0","groups":[]})", ReportFormat::json, {}, {});
    CHECK(snap.groups.empty());
}

TEST_CASE("fragments and paths are preserved field by field") {
    const char* doc = R"({"version":"v7","groups":[{"index":0,"fragments":[
        {"file":"lib/x.c","start_line":3,"end_line":9},
        {"file":"lib/y.c","start_line":1,"end_line":1,"text":"int q;"},
        {"file":"lib/x.c","start_line":40,"end_line":52}]}]})";
    const auto snap = parse_clone_report(doc, ReportFormat::automatic, {}, {});
    REQUIRE(snap.groups.size() == 1);
    const auto& f = snap.groups[0].fragments;
    REQUIRE(f.size() == 3);
    CHECK(f[0] == CloneFragment{"lib/x.c", 3, 9, std::nullopt});
    CHECK(f[1] == CloneFragment{"lib/y.c", 1, 1, std::string("int q;")});
    CHECK(f[2] == CloneFragment{"lib/x.c", 40, 52, std::nullopt});
}

TEST_CASE("explicit version label wins over the document's") {
    const auto snap = parse_clone_report(report_with_groups(1), ReportFormat::json, "override", {});
    CHECK(snap.version_id == "override");
}

TEST_CASE("malformed and invalid reports") {
    SUBCASE("syntax error names the line") {
        try {
            parse_clone_report("{\n\"version\": \"1\",\n\"groups\": [ }", ReportFormat::json, {}, {});
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
    SUBCASE("single-fragment group names its index") {
        const char* doc = R"({"version":"1","groups":[
            {"index":0,"fragments":[{"file":"a","start_line":1,"end_line":1},{"file":"b","start_line":1,"end_line":1}]},
            {"index":1,"fragments":[{"file":"a","start_line":1,"end_line":1}]}]})";
        try {
            parse_clone_report(doc, ReportFormat::json, {}, {});
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("index 1") != std::string::npos);
        }
    }
    SUBCASE("duplicate index") {
        const char* doc = R"({"version":"1","groups":[
            {"index":0,"fragments":[{"file":"a","start_line":1,"end_line":1},{"file":"b","start_line":1,"end_line":1}]},
            {"index":0,"fragments":[{"file":"a","start_line":1,"end_line":1},{"file":"b","start_line":1,"end_line":1}]}]})";
        CHECK_THROWS_WITH_AS(parse_clone_report(doc, ReportFormat::json, {}, {}),
                             doctest::Contains("duplicate group index 0"), ValidationError);
    }
    SUBCASE("start after end") {
        const char* doc = R"({"version":"1","groups":[{"fragments":[
            {"file":"a","start_line":5,"end_line":2},{"file":"b","start_line":1,"end_line":1}]}]})";
        CHECK_THROWS_AS(parse_clone_report(doc, ReportFormat::json, {}, {}), ValidationError);
    }
    SUBCASE("zero line number") {
        const char* doc = R"({"version":"1","groups":[{"fragments":[
            {"file":"a","start_line":0,"end_line":2},{"file":"b","start_line":1,"end_line":1}]}]})";
        CHECK_THROWS_AS(parse_clone_report(doc, ReportFormat::json, {}, {}), ValidationError);
    }
    SUBCASE("missing fields") {
        CHECK_THROWS_AS(parse_clone_report(R"({"groups":[]})", ReportFormat::json, {}, {}), ParseError);
        CHECK_THROWS_AS(parse_clone_report(R"({"version":"1"})", ReportFormat::json, {}, {}), ParseError);
        CHECK_THROWS_AS(parse_clone_report(R"({"version":"1","groups":[{"fragments":[{"start_line":1,"end_line":1}]}]})",
                                           ReportFormat::json, {}, {}),
                        ParseError);
    }
}

TEST_CASE("missing fragment file is an I/O error at ingest when a root is given") {
    TempDir dir;
    CHECK_THROWS_AS(parse_clone_report(report_with_groups(1), ReportFormat::json, {}, dir.path()), IoError);
}

TEST_CASE("paths escaping the source root are rejected") {
    TempDir dir;
    write_file(dir / "a.c", "x\n");
    const char* doc = R"({"version":"1","groups":[{"fragments":[
        {"file":"../a.c","start_line":1,"end_line":1},{"file":"a.c","start_line":1,"end_line":1}]}]})";
    CHECK_THROWS_AS(parse_clone_report(doc, ReportFormat::json, {}, dir / "sub"), ValidationError);
}

TEST_CASE("XML adapter") {
    const auto snap = parse_clone_report_file(fixture("xml/report.xml"), "2.2.3", fixture("save_all"));
    CHECK(snap.version_id == "2.2.3");
    REQUIRE(snap.groups.size() == 2);
    CHECK(snap.groups[0].fragments.size() == 2);
    CHECK(snap.groups[1].fragments.size() == 3);
    CHECK(snap.groups[1].index == 1);
    CHECK(snap.groups[0].fragments[1] == CloneFragment{"src/document.c", 6, 17, std::nullopt});

    SUBCASE("file name supplies the label when none is given") {
        CHECK(parse_clone_report_file(fixture("xml/report.xml")).version_id == "report");
    }
    SUBCASE("broken XML reports its line") {
        try {
            parse_clone_report("<clones>\n<class id=\"1\">\n<source file=\"a\"\n</clones>", ReportFormat::xml, "v", {});
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("line") != std::string::npos);
        }
    }
    SUBCASE("missing attribute") {
        CHECK_THROWS_WITH_AS(
            parse_clone_report(R"(<clones><class id="1"><source file="a" startline="1"/><source file="b" startline="1" endline="1"/></class></clones>)",
                               ReportFormat::xml, "v", {}),
            doctest::Contains("endline"), ParseError);
    }
    SUBCASE("duplicate class id") {
        CHECK_THROWS_AS(
            parse_clone_report(R"(<clones>
                <class id="1"><source file="a" startline="1" endline="1"/><source file="b" startline="1" endline="1"/></class>
                <class id="1"><source file="a" startline="1" endline="1"/><source file="b" startline="1" endline="1"/></class>
              </clones>)", ReportFormat::xml, "v", {}),
            ValidationError);
    }
}

TEST_CASE("resolve_fragment_text slices inclusive line ranges") {
    TempDir dir;
    std::string ten;
    for (int i = 1; i <= 10; ++i)
        ten += "line" + std::to_string(i) + "\n";
    write_file(dir / "ten.c", ten);
    write_file(dir / "one.c", "only");
    write_file(dir / "crlf.c", "a\r\nb\r\nc\r\n");

    CHECK(resolve_fragment_text({"ten.c", 2, 4, {}}, dir.path()) == "line2\nline3\nline4");
    CHECK(resolve_fragment_text({"ten.c", 10, 10, {}}, dir.path()) == "line10");
    CHECK(resolve_fragment_text({"one.c", 1, 1, {}}, dir.path()) == "only");
    CHECK(resolve_fragment_text({"crlf.c", 1, 3, {}}, dir.path()) == "a\nb\nc");

    CHECK_THROWS_WITH_AS(resolve_fragment_text({"ten.c", 5, 12, {}}, dir.path()),
                         doctest::Contains("5..12"), RangeError);
    CHECK_THROWS_WITH_AS(resolve_fragment_text({"nope.c", 1, 1, {}}, dir.path()),
                         doctest::Contains("nope.c"), IoError);

    SUBCASE("resolution is pure") {
        const CloneFragment f{"ten.c", 3, 7, {}};
        CHECK(resolve_fragment_text(f, dir.path()) == resolve_fragment_text(f, dir.path()));
    }
}

TEST_CASE("invalid UTF-8 is replaced, never fatal") {
    CHECK(sanitize_utf8("ok \xC3\xA9") == "ok \xC3\xA9");
    CHECK(sanitize_utf8("bad \xFF end") == "bad \xEF\xBF\xBD end");
    CHECK(sanitize_utf8("\xC3") == "\xEF\xBF\xBD");
    CHECK(sanitize_utf8("\xED\xA0\x80") == "\xEF\xBF\xBD\xEF\xBF\xBD\xEF\xBF\xBD");  // surrogate

    TempDir dir;
    write_file(dir / "latin1.c", "caf\xE9\nint x;\n");
    CHECK(resolve_fragment_text({"latin1.c", 1, 2, {}}, dir.path()) == "caf\xEF\xBF\xBD\nint x;");
}

TEST_CASE("resolve_snapshot_text fills every fragment") {
    auto snap = parse_clone_report_file(fixture("save_all/report.json"), {}, fixture("save_all"));
    CHECK_FALSE(snap.groups[0].text_resolved());
    const auto resolved = resolve_snapshot_text(snap);
    REQUIRE(resolved.groups[0].text_resolved());
    CHECK(resolved.groups[0].fragments[0].text->rfind("/* save every", 0) == 0);
    CHECK(resolved.groups[0].fragments[1].text->find("cb);\n}") != std::string::npos);

    snap.source_root.clear();
    CHECK_THROWS_AS(resolve_snapshot_text(snap), IoError);
}

TEST_CASE("property: JSON round trip preserves snapshots") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        VersionSnapshot snap;
        snap.version_id = "v" + std::to_string(rng.below(1000));
        const auto groups = rng.below(6);
        for (std::size_t g = 0; g < groups; ++g) {
            CloneGroup cg;
            cg.index = g;
            const auto frags = 2 + rng.below(4);
            for (std::size_t f = 0; f < frags; ++f) {
                CloneFragment fr;
                fr.file = "dir" + std::to_string(rng.below(3)) + "/f" + std::to_string(rng.below(9)) + ".c";
                fr.start_line = 1 + rng.below(500);
                fr.end_line = fr.start_line + rng.below(40);
                if (rng.chance(0.3))
                    fr.text = "int v" + std::to_string(rng.below(99)) + ";\n\tcall();";
                cg.fragments.push_back(fr);
            }
            snap.groups.push_back(cg);
        }
        const auto dumped = snapshot_to_json(snap).dump();
        const auto back = parse_clone_report(dumped, ReportFormat::json, {}, {});
        REQUIRE(back == snap);
        CHECK(back.groups.size() == snap.groups.size());
    }
}
