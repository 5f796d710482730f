#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "moverec/frontend.hpp"
#include "moverec/injector.hpp"
#include "moverec/synth.hpp"

using namespace moverec;

namespace {

// Twelve methods in A, classified by hand. Movable: weigh, mix, measure, same.
const char* kFixtureA = R"(class A {
    int count;
    A(int c) { count = c; }
    static int twice(B b) { return b.v * 2; }
    void noop(B b) { }
    int getCount() { return count; }
    void setCount(int c) { count = c; }
    int relay(B b, int k) { return b.scale(b, k); }
    int weigh(B b) { return b.v + b.w; }
    int mix(B b, C c) { return b.v * c.w; }
    int bump(B b) { return b.v + count; }
    int plain(int x) { return x * x + 1; }
    int measure(C c) { int t = c.w; return t * 2; }
    boolean same(B b, B other) { return b.v == other.v; }
}
)";

const char* kFixtureB = "class B { int v; int w; int scale(B b, int k) { return k; } }";
const char* kFixtureC = "class C { int w; int wide() { return w * 2; } }";

Corpus fixture() {
    Corpus c;
    c.units.push_back(parse_unit(kFixtureA, "p/A.java"));
    c.units.push_back(parse_unit(kFixtureB, "p/B.java"));
    c.units.push_back(parse_unit(kFixtureC, "p/C.java"));
    return c;
}

std::size_t methods_in(const Corpus& c, std::string_view class_id) {
    return find_class(c, class_id).cls->methods.size();
}

MethodVectors random_vectors(const Corpus& c, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    MethodVectors out;
    for (const auto& u : c.units)
        for (const auto& cls : u.classes)
            for (const auto& m : cls.methods) {
                Vector v(static_cast<Eigen::Index>(d));
                for (auto& x : v) x = g(rng);
                out[m.id] = v;
            }
    return out;
}

std::vector<LabeledExample> examples_for(std::size_t groups, std::size_t per_group) {
    std::vector<LabeledExample> out;
    for (std::size_t g = 0; g < groups; ++g) {
        for (std::size_t k = 0; k < per_group; ++k) {
            LabeledExample e;
            e.feature.method_id = "p/A.java:A.m" + std::to_string(g) + "/1";
            e.feature.class_id = "p/A.java:A";
            e.feature.values = Vector::Constant(2, static_cast<double>(g));
            e.label = static_cast<int>(k % 2);
            out.push_back(std::move(e));
        }
    }
    return out;
}

std::set<std::string> ids(const std::vector<LabeledExample>& v) {
    std::set<std::string> out;
    for (const auto& e : v) out.insert(e.feature.method_id);
    return out;
}

}  // namespace

TEST_CASE("hand-labeled filters") {
    const Corpus c = fixture();
    const ClassIndex idx(c);
    const ClassDecl& a = c.units[0].classes[0];
    const std::map<std::string, MoveFilter> expected{
        {"A", MoveFilter::Constructor},    {"twice", MoveFilter::Static},        {"noop", MoveFilter::Empty},
        {"getCount", MoveFilter::Parameterless}, {"setCount", MoveFilter::Setter}, {"relay", MoveFilter::Delegation},
        {"weigh", MoveFilter::Movable},    {"mix", MoveFilter::Movable},         {"bump", MoveFilter::TouchesOriginState},
        {"plain", MoveFilter::NoTargets},  {"measure", MoveFilter::Movable},     {"same", MoveFilter::Movable},
    };
    REQUIRE(a.methods.size() == 12);
    for (const auto& m : a.methods) {
        CAPTURE(m.name);
        CHECK(filter_name(classify_method(a, m, idx, "p")) == filter_name(expected.at(m.name)));
    }
    const auto movable = find_movable(c);
    CHECK(movable.size() == 4);

    SUBCASE("targets are parameter classes without duplicates") {
        const auto& mix = *a.find_method("mix", 2);
        CHECK(target_classes(a, mix, idx, "p") == std::vector<std::string>{"p/B.java:B", "p/C.java:C"});
        const auto& same = *a.find_method("same", 2);
        CHECK(target_classes(a, same, idx, "p") == std::vector<std::string>{"p/B.java:B"});
    }

    SUBCASE("origin state is allowed when recommending") {
        FilterOptions relaxed{false};
        CHECK(classify_method(a, *a.find_method("bump", 1), idx, "p", relaxed) == MoveFilter::Movable);
        CHECK(find_movable(c, relaxed).size() == 5);
    }
}

TEST_CASE("getters and setters in the this-qualified form") {
    SourceUnit u = parse_unit(
        "class A { int x; int getX() { return this.x; } void setX(int v) { this.x = v; } int peek(B b) { return x + b.v; } }",
        "p/A.java");
    Corpus c;
    c.units.push_back(u);
    c.units.push_back(parse_unit("class B { }", "p/B.java"));
    const ClassIndex idx(c);
    const ClassDecl& a = c.units[0].classes[0];
    CHECK(classify_method(a, a.methods[1], idx, "p") == MoveFilter::Setter);
    CHECK(classify_method(a, a.methods[2], idx, "p") == MoveFilter::TouchesOriginState);
}

TEST_CASE("moving into a parameter's class") {
    Corpus c;
    c.units.push_back(parse_unit("class A { int calc(B b) { return b.m() + 1; } int keep() { return 0; } }", "p/A.java"));
    c.units.push_back(parse_unit("class B { int m() { return 2; } }", "p/B.java"));
    MoveResult r = perform_move(c, "p/A.java:A.calc/1", "p/B.java:B");

    const ClassDecl& b = *find_class(r.corpus, "p/B.java:B").cls;
    REQUIRE(b.methods.size() == 2);
    CHECK(print_unit(*find_class(r.corpus, "p/B.java:B").unit).find("int calc(A b) {\n        return m() + 1;") !=
          std::string::npos);
    CHECK(methods_in(r.corpus, "p/A.java:A") == 1);
    CHECK(r.entry.moved_method_id == "p/B.java:B.calc/1");
    CHECK(r.entry.original_class_id == "p/A.java:A");
    CHECK(r.entry.injected_class_id == "p/B.java:B");
    CHECK(r.entry.original_index == 0);
    CHECK_THROWS_AS(find_enclosing(r.corpus, "p/A.java:A.calc/1"), NotFound);

    SUBCASE("the moved method is found again and moving back restores the corpus") {
        Corpus back = undo_move(r.corpus, r.entry);
        CHECK(same_structure(back, c));
        MoveResult again = perform_move(r.corpus, r.entry.moved_method_id, "p/A.java:A", 0);
        CHECK(same_structure(again.corpus, c));
    }
}

TEST_CASE("receiver and parameter swap roles") {
    Corpus c;
    c.units.push_back(parse_unit(
        "class A { int k; int f(B b, int n) { if (b.v > n) { return b.g(this); } return b.v; } int other() { return 1; } }",
        "p/A.java"));
    c.units.push_back(parse_unit("class B { int v; int g(A a) { return a.k; } }", "p/B.java"));
    MoveResult r = perform_move(c, "p/A.java:A.f/2", "p/B.java:B");
    const std::string printed = print_unit(*find_class(r.corpus, "p/B.java:B").unit);
    CHECK(printed.find("int f(A b, int n)") != std::string::npos);
    CHECK(printed.find("return g(b);") != std::string::npos);
    CHECK(printed.find("return v;") != std::string::npos);
    CHECK(same_structure(undo_move(r.corpus, r.entry), c));
}

TEST_CASE("moves that would change behavior are refused") {
    Corpus c;
    c.units.push_back(parse_unit(R"(class A {
    int k;
    int shadow(B b) { int v = 1; return b.v + v; }
    int selfish(B b) { return this.k + b.v; }
    int rec(B b) { return rec(b); }
    int missing(B b) { return b.nope; }
    static int st(B b) { return b.v; }
    int dup(B b) { return b.v; }
    int twoA(A a, B b) { return b.v; }
}
)",
                                 "p/A.java"));
    c.units.push_back(parse_unit("class B { int v; int dup(A a) { return 0; } }", "p/B.java"));
    c.units.push_back(parse_unit("class D { int v; }", "q/D.java"));
    CHECK_THROWS_AS(perform_move(c, "p/A.java:A.shadow/1", "p/B.java:B"), NotMovable);
    CHECK_THROWS_AS(perform_move(c, "p/A.java:A.selfish/1", "p/B.java:B"), NotMovable);
    CHECK_THROWS_AS(perform_move(c, "p/A.java:A.rec/1", "p/B.java:B"), NotMovable);
    CHECK_THROWS_AS(perform_move(c, "p/A.java:A.missing/1", "p/B.java:B"), NotMovable);
    CHECK_THROWS_AS(perform_move(c, "p/A.java:A.st/1", "p/B.java:B"), NotMovable);
    CHECK_THROWS_AS(perform_move(c, "p/A.java:A.dup/1", "p/B.java:B"), NotMovable);
    CHECK_THROWS_AS(perform_move(c, "p/A.java:A.twoA/2", "p/B.java:B"), NotMovable);
    CHECK_THROWS_AS(perform_move(c, "p/A.java:A.shadow/1", "p/A.java:A"), NotMovable);
    CHECK_THROWS_AS(perform_move(c, "p/A.java:A.dup/1", "q/D.java:D"), NotMovable);
    CHECK_THROWS_AS(perform_move(c, "p/A.java:A.dup/1", "p/Z.java:Z"), UnresolvedTarget);
    CHECK_THROWS_AS(perform_move(c, "p/A.java:A.gone/1", "p/B.java:B"), NotFound);
}

TEST_CASE("every movable candidate of a synthetic corpus moves and comes back") {
    SynthOptions o;
    o.projects = 2;
    o.seed = 11;
    const Corpus c = generate_corpus(o);
    const auto candidates = find_movable(c);
    REQUIRE(candidates.size() > 10);
    std::size_t moved = 0;
    for (const auto& cand : candidates) {
        for (const auto& target : cand.target_class_ids) {
            CAPTURE(cand.method_id);
            CAPTURE(target);
            MoveResult r = [&] {
                try {
                    return perform_move(c, cand.method_id, target);
                } catch (const NotMovable&) {
                    return MoveResult{};
                }
            }();
            if (r.corpus.units.empty()) continue;
            ++moved;
            CHECK(methods_in(r.corpus, cand.origin_class_id) + 1 == methods_in(c, cand.origin_class_id));
            CHECK(methods_in(r.corpus, target) == methods_in(c, target) + 1);
            CHECK(same_structure(undo_move(r.corpus, r.entry), c));
            // The printed corpus parses again.
            for (const auto& u : r.corpus.units) CHECK_NOTHROW(parse_unit(print_unit(u), u.file_path));
        }
    }
    CHECK(moved > 10);
}

TEST_CASE("injection") {
    SynthOptions o;
    o.projects = 3;
    o.seed = 4;
    const Corpus c = generate_corpus(o);
    const Injection inj = inject_moves(c, 6, 21);
    // The per-class caps can leave a project short of six moves.
    CHECK(inj.ground_truth.size() <= 18);
    CHECK(inj.ground_truth.size() >= 12);

    std::map<std::string, int> received, given;
    for (const auto& g : inj.ground_truth) {
        CHECK(++received[g.injected_class_id] == 1);
        CHECK(++given[g.original_class_id] <= 2);
        CHECK(find_enclosing(inj.corpus, g.moved_method_id).cls->id == g.injected_class_id);
    }

    SUBCASE("undoing in reverse order restores the input") {
        Corpus back = inj.corpus;
        for (auto it = inj.ground_truth.rbegin(); it != inj.ground_truth.rend(); ++it) back = undo_move(back, *it);
        CHECK(same_structure(back, c));
    }

    SUBCASE("seeded") {
        CHECK(inject_moves(c, 6, 21).ground_truth == inj.ground_truth);
        CHECK(inject_moves(c, 6, 22).ground_truth != inj.ground_truth);
    }
}

TEST_CASE("dataset balance") {
    const Corpus c = fixture();
    const MethodVectors vectors = random_vectors(c, 4, 1);
    const auto candidates = find_movable(c);

    SUBCASE("two targets give two negatives and two positives") {
        std::vector<CandidateMove> mix;
        for (const auto& cand : candidates)
            if (cand.method_id == "p/A.java:A.mix/2") mix.push_back(cand);
        REQUIRE(mix.size() == 1);
        const auto ex = build_dataset(c, vectors, mix);
        REQUIRE(ex.size() == 4);
        CHECK(ex[0].label == 0);
        CHECK(ex[0].feature.class_id == "p/B.java:B");
        CHECK(ex[1].label == 0);
        CHECK(ex[1].feature.class_id == "p/C.java:C");
        CHECK(ex[2].label == 1);
        CHECK(ex[3].label == 1);
        CHECK(ex[2].feature.class_id == "p/A.java:A");
        CHECK(ex[0].feature.values.size() == 8);
        // The origin half excludes the method itself.
        const Vector origin = class_embedding(c.units[0].classes[0], vectors, "p/A.java:A.mix/2");
        CHECK(ex[2].feature.values.tail(4) == origin);
        CHECK(ex[2].feature.values.head(4) == vectors.at("p/A.java:A.mix/2"));
    }

    SUBCASE("a whole synthetic corpus") {
        SynthOptions o;
        o.projects = 4;
        const Corpus s = generate_corpus(o);
        const auto ex = build_dataset(s, random_vectors(s, 3, 2), find_movable(s));
        std::size_t pos = 0;
        for (const auto& e : ex) pos += e.label == 1;
        CHECK(ex.size() > 0);
        CHECK(2 * pos == ex.size());
    }

    SUBCASE("a target without vectors drops a pair") {
        MethodVectors partial = vectors;
        partial.erase("p/C.java:C.wide/0");
        std::vector<std::string> skipped;
        std::vector<CandidateMove> mix;
        for (const auto& cand : candidates)
            if (cand.method_id == "p/A.java:A.mix/2") mix.push_back(cand);
        const auto ex = build_dataset(c, partial, mix, &skipped);
        CHECK(ex.size() == 2);
        CHECK(skipped.size() == 1);
    }
}

TEST_CASE("group-wise split") {
    SUBCASE("one hundred singleton groups") {
        DatasetSplit s = split_dataset(examples_for(100, 1), 3);
        CHECK(s.train.size() == 60);
        CHECK(s.test.size() == 20);
        CHECK(s.validate.size() == 20);
    }

    SUBCASE("seven groups") {
        DatasetSplit s = split_dataset(examples_for(7, 2), 3);
        CHECK(s.train.size() == 10);
        CHECK(s.test.size() == 2);
        CHECK(s.validate.size() == 2);
    }

    SUBCASE("no method crosses partitions") {
        DatasetSplit s = split_dataset(examples_for(33, 4), 9);
        const auto tr = ids(s.train), te = ids(s.test), va = ids(s.validate);
        for (const auto& id : te) CHECK(!tr.count(id));
        for (const auto& id : va) {
            CHECK(!tr.count(id));
            CHECK(!te.count(id));
        }
        CHECK(tr.size() + te.size() + va.size() == 33);
        CHECK(te.size() == 7);
        CHECK(va.size() == 7);
    }

    SUBCASE("input order does not matter") {
        auto ex = examples_for(20, 2);
        DatasetSplit a = split_dataset(ex, 5);
        std::shuffle(ex.begin(), ex.end(), std::mt19937_64(1));
        DatasetSplit b = split_dataset(ex, 5);
        CHECK(ids(a.test) == ids(b.test));
        CHECK(ids(a.validate) == ids(b.validate));
        CHECK(ids(split_dataset(examples_for(20, 2), 6).test) != ids(a.test));
    }

    SUBCASE("every group count stays within one of the ratio") {
        for (std::size_t g = 5; g <= 60; ++g) {
            CAPTURE(g);
            DatasetSplit s = split_dataset(examples_for(g, 1), 1);
            const double fifth = static_cast<double>(g) / 5.0;
            CHECK(std::abs(static_cast<double>(s.train.size()) - 3.0 * fifth) <= 1.0);
            CHECK(std::abs(static_cast<double>(s.test.size()) - fifth) <= 1.0);
            CHECK(std::abs(static_cast<double>(s.validate.size()) - fifth) <= 1.0);
        }
    }

    SUBCASE("too few groups") { CHECK_THROWS_AS(split_dataset(examples_for(4, 3), 1), TooFew); }
}
