#include <doctest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "qdb/environment.hpp"
#include "qdb/error.hpp"
#include "qdb/instance_io.hpp"
#include "qdb/synthetic.hpp"

using namespace qdb;
using qdb::test::env_from_patterns;
using qdb::test::from_patterns;

namespace {

Observation obs_at(const Environment& env, std::size_t arm, std::size_t rank, std::size_t step) {
    Observation o;
    o.step = step;
    o.arm = env.arm_id(arm);
    o.arm_index = arm;
    o.rank = rank;
    o.doc_index = env.doc_at(arm, rank);
    o.doc_id = env.doc_id(o.doc_index);
    return o;
}

bool has_kind(const std::vector<Violation>& vs, Violation::Kind k) {
    for (const auto& v : vs) {
        if (v.kind == k) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("next_unobserved_rank walks the ranking prefix") {
    const Environment env = env_from_patterns({std::vector<int>(10, 0)});
    ObservationLog log;
    CHECK(next_unobserved_rank(env, 0, log) == 0u);

    for (std::size_t r = 0; r < 3; ++r) log.observations.push_back(obs_at(env, 0, r, r + 1));
    CHECK(next_unobserved_rank(env, 0, log) == 3u);

    for (std::size_t r = 3; r < 10; ++r) log.observations.push_back(obs_at(env, 0, r, r + 1));
    CHECK_FALSE(next_unobserved_rank(env, 0, log).has_value());
}

TEST_CASE("budget_to_steps floors against the whole retrieved pool") {
    CHECK(budget_to_steps(0.2, 16 * 10) == 32);
    CHECK(budget_to_steps(1.0, 160) == 160);
    CHECK(budget_to_steps(0.1, 7) == 1);
    CHECK(budget_to_steps(0.3, 10) == 3);
    CHECK(budget_to_steps(0.7, 10) == 7);

    CHECK_THROWS_AS(budget_to_steps(0.0, 10), Error);
    CHECK_THROWS_AS(budget_to_steps(1.5, 10), Error);
    try {
        budget_to_steps(-0.1, 10);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::invalid_argument);
    }

    const Environment env = env_from_patterns({{1, 0, 1}, {0, 0}});
    CHECK(budget_to_steps(1.0, env) == 5);
}

TEST_CASE("validate_instance reports each violation") {
    SUBCASE("well-formed") { CHECK(validate_instance(from_patterns({{1, 0}, {0, 1}})).empty()); }

    SUBCASE("duplicate doc in one ranking") {
        auto inst = from_patterns({{1, 0, 1}});
        inst.subqueries[0].ranking[2].doc_id = inst.subqueries[0].ranking[0].doc_id;
        const auto vs = validate_instance(inst);
        REQUIRE(vs.size() == 1);
        CHECK(vs[0].kind == Violation::Kind::duplicate_doc);
    }

    SUBCASE("two-node parent cycle is one violation") {
        auto inst = from_patterns({{1}, {0}});
        inst.subqueries[0].parent_id = "a2";
        inst.subqueries[1].parent_id = "a1";
        const auto vs = validate_instance(inst);
        REQUIRE(vs.size() == 1);
        CHECK(vs[0].kind == Violation::Kind::parent_cycle);
    }

    SUBCASE("self parent") {
        auto inst = from_patterns({{1}});
        inst.subqueries[0].parent_id = "a1";
        CHECK(has_kind(validate_instance(inst), Violation::Kind::parent_cycle));
    }

    SUBCASE("missing judgment only in strict mode") {
        auto inst = from_patterns({{1, 0}});
        inst.judgments.erase("a1-1");
        CHECK(has_kind(validate_instance(inst), Violation::Kind::missing_judgment));
        CHECK(validate_instance(inst, /*permissive=*/true).empty());
    }

    SUBCASE("embedding dimensions and empties") {
        auto inst = from_patterns({{1, 0, 1}});
        qdb::test::set_embeddings(inst, {{"a1-0", {1, 0}}, {"a1-1", {1, 0, 0}}, {"a1-2", {}}});
        const auto vs = validate_instance(inst);
        CHECK(has_kind(vs, Violation::Kind::embedding_dimension));
        CHECK(has_kind(vs, Violation::Kind::empty_embedding));
    }

    SUBCASE("scan continues past the first problem") {
        auto inst = from_patterns({{1, 0}, {1}});
        inst.subqueries[0].ranking[1].doc_id = "a1-0";
        inst.subqueries[1].parent_id = "nope";
        inst.judgments["a1-0"] = 2;
        const auto vs = validate_instance(inst);
        CHECK(has_kind(vs, Violation::Kind::duplicate_doc));
        CHECK(has_kind(vs, Violation::Kind::unknown_parent));
        CHECK(has_kind(vs, Violation::Kind::invalid_judgment));
    }
}

TEST_CASE("Environment rejects invalid instances and dedupes documents across arms") {
    auto bad = from_patterns({{1, 0}});
    bad.judgments.clear();
    CHECK_THROWS_AS(Environment{bad}, Error);
    CHECK_NOTHROW(Environment(bad, EnvironmentOptions{.permissive = true}).arm_count());

    auto inst = from_patterns({{1, 0}, {0}});
    inst.subqueries[1].ranking[0].doc_id = "a1-0";  // same document retrieved by both arms
    const Environment env(inst);
    CHECK(env.total_documents() == 3);
    CHECK(env.doc_count() == 2);
    CHECK(env.doc_at(1, 0) == env.doc_at(0, 0));
    CHECK(env.relevant_doc_count() == 1);
}

TEST_CASE("relevance lookup honours the load flag") {
    auto inst = from_patterns({{1, 0}});
    const Environment strict(inst);
    CHECK(strict.relevance("a1-0") == 1);
    CHECK(strict.relevance("a1-1") == 0);
    try {
        strict.relevance("unknown");
        FAIL("expected missing-judgment");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::missing_judgment);
    }

    inst.judgments.erase("a1-1");
    const Environment permissive(inst, EnvironmentOptions{.permissive = true});
    CHECK(permissive.relevance("a1-1") == 0);
    CHECK(permissive.relevance("unknown") == 0);
}

TEST_CASE("judgment lookups are stationary") {
    const Environment env(generate_synthetic(hot_cold_spec(), 3));
    for (std::size_t d = 0; d < env.doc_count(); ++d) {
        const int first = env.relevance(env.doc_id(d));
        for (int rep = 0; rep < 3; ++rep) CHECK(env.relevance(env.doc_id(d)) == first);
    }
}

TEST_CASE("instance JSON round-trips through JSON lines") {
    SyntheticSpec spec = hot_cold_spec();
    spec.redundancy_rate = 0.3;
    spec.hierarchy = HierarchySpec{2, 2, {0.8, 0.1}};
    std::vector<RequestInstance> in;
    for (std::uint64_t s = 0; s < 5; ++s) in.push_back(generate_synthetic(spec, s));
    in[0].subqueries[0].ranking[0].text = "some text";

    std::stringstream buf;
    write_instances(buf, in);
    const auto out = read_instances(buf);
    REQUIRE(out.size() == in.size());
    for (std::size_t i = 0; i < in.size(); ++i) CHECK(serialize_instance(out[i]) == serialize_instance(in[i]));
    CHECK(out[0].subqueries[2].parent_id == std::optional<std::string>("h0"));
    CHECK(out[0].subqueries[0].ranking[0].text == std::optional<std::string>("some text"));
}

TEST_CASE("malformed JSON lines carry line numbers") {
    std::stringstream buf;
    buf << serialize_instance(from_patterns({{1}})) << "\n\n{\"request_id\": \"x\"}\n";
    try {
        read_instances(buf);
        FAIL("expected malformed-input");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::malformed_input);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        CHECK(std::string(e.what()).find("subqueries") != std::string::npos);
    }

    std::stringstream junk("not json\n");
    CHECK_THROWS_AS(read_instances(junk), Error);
}

TEST_CASE("parse_instance reads the documented schema") {
    const auto inst = parse_instance(R"({
        "request_id": "r1", "request_text": "why",
        "subqueries": [
            {"id": "h", "parent": null, "text": "head", "ranking": [{"doc": "d1", "score": 2.5}]},
            {"id": "c", "parent": "h", "text": "child", "ranking": [{"doc": "d2", "score": 1}, {"doc": "d1", "score": 0.5}]}
        ],
        "judgments": {"d1": 1, "d2": 0},
        "nuggets": {"d1": ["n1", "n2"]},
        "embeddings": {"d1": [1, 0], "d2": [0, 1]}
    })");
    CHECK(inst.request_id == "r1");
    REQUIRE(inst.subqueries.size() == 2);
    CHECK_FALSE(inst.subqueries[0].parent_id.has_value());
    CHECK(*inst.subqueries[1].parent_id == "h");
    CHECK(inst.subqueries[0].ranking[0].score == 2.5);
    CHECK(inst.nuggets->at("d1").size() == 2);
    CHECK(inst.embeddings->at("d2") == std::vector<double>{0, 1});

    const Environment env(inst);
    CHECK(env.children(0) == std::vector<std::size_t>{1});
    CHECK(env.parent(1) == 0u);
    CHECK(env.nugget_count() == 2);
}
