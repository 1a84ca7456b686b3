#include <doctest.h>

#include <sstream>

#include "confsd/dataset_io.hpp"
#include "confsd/graph.hpp"
#include "support.hpp"

using namespace confsd;

namespace {

Dataset small_dataset() {
    auto g = generate_graph(BarabasiAlbert{30, 2}, 1);
    DatasetSpec spec;
    spec.params.r0 = RealRange{1.0, 5.0};
    spec.source_count = {1, 4};
    Dataset d;
    d.header.graph = "ba:30:2";
    d.header.graph_seed = 1;
    d.header.n_nodes = 30;
    d.header.seed = 5;
    d.header.config_hash = config_hash("x");
    d.samples = sample_dataset(g, spec, 12, 5);
    // an SI record so a null r0 is exercised
    d.samples[3].r0.reset();
    return d;
}

bool same(const Dataset& a, const Dataset& b) {
    return a.samples == b.samples && a.header.graph == b.header.graph && a.header.seed == b.header.seed &&
           a.header.n_nodes == b.header.n_nodes && a.header.config_hash == b.header.config_hash &&
           a.header.graph_seed == b.header.graph_seed;
}

} // namespace

TEST_CASE("config hash is FNV-1a 64") {
    // reference values of the 64-bit FNV-1a function
    CHECK(config_hash("") == "cbf29ce484222325");
    CHECK(config_hash("a") == "af63dc4c8601ec8c");
}

TEST_CASE("jsonl round trip") {
    auto d = small_dataset();
    std::stringstream buf;
    write_jsonl(buf, d);
    auto back = read_jsonl(buf);
    CHECK(same(d, back));
}

TEST_CASE("binary round trip") {
    auto d = small_dataset();
    std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
    write_binary(buf, d);
    auto back = read_binary(buf);
    CHECK(same(d, back));
    CHECK(buf.str().substr(0, 4) == "CSDB");
}

TEST_CASE("format picked by extension") {
    testing::TempDir dir;
    auto d = small_dataset();
    save_dataset(dir / "d.jsonl", d);
    save_dataset(dir / "d.bin", d);
    CHECK(same(load_dataset(dir / "d.jsonl"), d));
    CHECK(same(load_dataset(dir / "d.bin"), d));
    CHECK(testing::read_file(dir / "d.jsonl").front() == '{');
    CHECK_THROWS_AS(load_dataset(dir / "none.jsonl"), ValidationError);
}

TEST_CASE("malformed records name their line") {
    const std::string header =
        R"({"header":{"format":"confsd-dataset","tool_version":"0.1.0","graph":"complete:3","graph_seed":0,"n_nodes":3,"seed":0,"config_hash":"0"}})";
    auto parse = [&](const std::string& record) {
        std::stringstream in(header + "\n" + record + "\n");
        return read_jsonl(in);
    };
    CHECK(parse(R"({"id":0,"times":[1],"snapshots":["ISS"],"sources":[0],"sigma_inf":0.5,"sigma_rec":0,"r0":null})")
              .samples.size() == 1);
    try {
        parse(R"({"id":0,"times":[1],"snapshots":["IS"],"sources":[0],"sigma_inf":0.5,"sigma_rec":0,"r0":null})");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse(R"({"id":0,"times":[1],"snapshots":["IXS"],"sources":[0],"sigma_inf":0.5,"sigma_rec":0})"),
                    ParseError);
    CHECK_THROWS_AS(parse(R"({"id":0,"times":[1],"snapshots":["ISS"],"sources":[],"sigma_inf":0.5,"sigma_rec":0})"),
                    ParseError);
    CHECK_THROWS_AS(parse(R"({"id":0,"times":[1],"snapshots":["ISS"],"sources":[7],"sigma_inf":0.5,"sigma_rec":0})"),
                    ParseError);
    CHECK_THROWS_AS(parse("not json"), ParseError);
    std::stringstream no_header(R"({"id":0})");
    CHECK_THROWS_AS(read_jsonl(no_header), ValidationError);
}
