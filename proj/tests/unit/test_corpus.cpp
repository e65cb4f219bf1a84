#include <doctest.h>

#include <fstream>

#include "refinery/corpus/record_io.hpp"
#include "refinery/corpus/tokenizer.hpp"
#include "refinery/text/utf8.hpp"
#include "refinery/util/io.hpp"
#include "refinery/util/random.hpp"
#include "support/temp_dir.hpp"

using namespace refinery;
using corpus::Document;

namespace {

void write_raw(const std::filesystem::path& p, const std::string& s) {
    std::ofstream(p, std::ios::binary) << s;
}

std::string random_text(util::Rng& rng) {
    std::string out;
    std::size_t n = rng.below(40);
    for (std::size_t i = 0; i < n; ++i) {
        char32_t cp;
        switch (rng.below(4)) {
            case 0: cp = static_cast<char32_t>(rng.below(0x80)); break;
            case 1: cp = static_cast<char32_t>(0x80 + rng.below(0x780)); break;
            case 2: cp = static_cast<char32_t>(0x800 + rng.below(0xD000 - 0x800)); break;
            default: cp = static_cast<char32_t>(0x10000 + rng.below(0x100000)); break;
        }
        text::append_utf8(out, cp);
    }
    return out;
}

}  // namespace

TEST_CASE("minimal record reads with defaults") {
    testing::TempDir dir;
    write_raw(dir / "a.jsonl", R"({"id":"d1","dump":"2023-06","text":"hello"})" "\n");
    auto r = corpus::read_records(dir / "a.jsonl");
    REQUIRE(r.documents.size() == 1);
    CHECK(r.errors.empty());
    CHECK(r.documents[0].id == "d1");
    CHECK(r.documents[0].dump_id == "2023-06");
    CHECK(r.documents[0].stage == corpus::Stage::raw);
    CHECK_FALSE(r.documents[0].safety.has_value());
    CHECK_FALSE(r.documents[0].quality.has_value());
}

TEST_CASE("empty file is an empty stream") {
    testing::TempDir dir;
    write_raw(dir / "e.jsonl", "");
    auto r = corpus::read_records(dir / "e.jsonl");
    CHECK(r.documents.empty());
    CHECK(r.errors.empty());
}

TEST_CASE("malformed line yields an error record and the stream continues") {
    testing::TempDir dir;
    write_raw(dir / "m.jsonl",
              R"({"id":"d1","dump":"2023-06","text":"ok"})" "\n"
              R"({"id":"d2","dump":)" "\n"
              R"({"id":"d3","text":"missing dump"})" "\n"
              R"({"id":"d4","dump":"2019-35","text":"fine"})" "\n");
    auto r = corpus::read_records(dir / "m.jsonl");
    REQUIRE(r.documents.size() == 2);
    REQUIRE(r.errors.size() == 2);
    CHECK(r.errors[0].line == 2);
    CHECK(r.errors[1].line == 3);
    CHECK(r.documents[1].id == "d4");
}

TEST_CASE("unreadable file is fatal") {
    CHECK_THROWS_AS(corpus::read_records("/nonexistent/x.jsonl"), util::IoError);
}

TEST_CASE("round trip with annotations, extras and embedded newlines") {
    testing::TempDir dir;
    std::vector<Document> docs(3);
    docs[0].id = "a";
    docs[0].dump_id = "2019-35";
    docs[0].text = "line one\nline two \"quoted\"";
    docs[1].id = "b";
    docs[1].dump_id = "2021-04";
    docs[1].url = "http://example.com/x";
    docs[1].fetched_at = "2021-01-25T10:00:00Z";
    docs[1].language = "en";
    docs[1].stage = corpus::Stage::safe;
    docs[1].text = "tab\there";
    corpus::SafetyAnnotations s;
    s.blockword_hits = {{"bad", 3}};
    s.toxicity = 0.125;
    s.pii_spans = {{0, 4, "email"}};
    docs[1].safety = s;
    docs[2].id = "c";
    docs[2].dump_id = "2023-06";
    docs[2].text = "";
    docs[2].stage = corpus::Stage::high_quality;
    corpus::QualityAnnotations q;
    q.ad_score = 0.25;
    q.fluency_score = 0.75;
    q.fluency_dims = std::map<std::string, double>{{"coherence", 0.5}};
    q.selected = true;
    docs[2].quality = q;
    docs[2].extra["source"] = "fixture";
    docs[2].extra["nested"] = {{"k", 1}};

    CHECK(corpus::write_records(docs, dir / "rt.jsonl") == 3);
    auto back = corpus::read_records(dir / "rt.jsonl");
    CHECK(back.errors.empty());
    CHECK(back.documents == docs);
    // One physical line per record.
    auto raw = util::read_file(dir / "rt.jsonl");
    CHECK(std::count(raw.begin(), raw.end(), '\n') == 3);
}

TEST_CASE("empty stream writes an empty file") {
    testing::TempDir dir;
    CHECK(corpus::write_records({}, dir / "z.jsonl") == 0);
    CHECK(std::filesystem::exists(dir / "z.jsonl"));
    CHECK(std::filesystem::file_size(dir / "z.jsonl") == 0);
}

TEST_CASE("gzip record files round trip") {
    testing::TempDir dir;
    Document d;
    d.id = "g";
    d.dump_id = "2023-06";
    d.text = "compressed";
    corpus::write_records({d}, dir / "g.jsonl.gz");
    auto back = corpus::read_records(dir / "g.jsonl.gz");
    REQUIRE(back.documents.size() == 1);
    CHECK(back.documents[0] == d);
}

TEST_CASE("round trip property over arbitrary unicode text") {
    testing::TempDir dir;
    util::Rng rng(20240601);
    std::vector<Document> docs;
    for (int i = 0; i < 300; ++i) {
        Document d;
        d.id = "p" + std::to_string(i);
        d.dump_id = "2023-06";
        d.text = random_text(rng);
        d.url = random_text(rng);
        docs.push_back(std::move(d));
    }
    corpus::write_records(docs, dir / "p.jsonl");
    auto back = corpus::read_records(dir / "p.jsonl");
    CHECK(back.errors.empty());
    CHECK(back.documents == docs);
}

TEST_CASE("outcome attachment") {
    Document d;
    auto o = corpus::FilterOutcome::drop("R4");
    o.diagnostics["word_count"] = 49;
    corpus::attach_outcome(d, o, "clean");
    CHECK(d.extra["outcome"]["rule_id"] == "R4");
    CHECK(d.extra["outcome"]["stage"] == "clean");
    CHECK(d.extra["outcome"]["diagnostics"]["word_count"] == 49.0);
}

TEST_CASE("stage names") {
    CHECK(corpus::parse_stage("high_quality") == corpus::Stage::high_quality);
    CHECK_FALSE(corpus::parse_stage("bogus").has_value());
    CHECK(corpus::Stage::raw < corpus::Stage::clean);
}

TEST_CASE("whitespace tokenizer") {
    corpus::WhitespaceTokenizer t;
    CHECK(t.count_tokens("a  b\tc\n d") == 4);
    CHECK(t.count_tokens("") == 0);
}
