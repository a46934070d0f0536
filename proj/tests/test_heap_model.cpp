#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "ogo/heap_model.hpp"
#include "support.hpp"

using namespace ogo;
using namespace ogo::fj;
namespace t = ogo::testing;

namespace {

std::string fig_program() { return t::read_text(t::fixture_path("binary_tree_point.fj")); }

const char* kClasses = R"(
class N {
  N f;
  N g;
  int v;
  N(N f, N g, int v) { super(); this.f = f; this.g = g; this.v = v; }
  N link(N other) { this.f = other; return this; }
}
class M extends N {
  String tag;
  M(N f, N g, int v, String tag) { super(f, g, v); this.tag = tag; }
}
)";

}  // namespace

TEST(HeapModel, ParsesProgram) {
    Program p = parse_program(fig_program());
    EXPECT_EQ(p.classes.size(), 2u);
    ASSERT_NE(p.classes.find("BinaryTree$Node"), nullptr);
    ASSERT_NE(p.classes.find("BinaryTree"), nullptr);
    ASSERT_EQ(p.main.commands.size(), 2u);
    EXPECT_TRUE(std::holds_alternative<New>(p.main.commands[0].op));
    EXPECT_TRUE(std::holds_alternative<New>(p.main.commands[1].op));
    EXPECT_EQ(p.main.result, std::optional<std::string>("b"));
    EXPECT_TRUE(p.main.point_before_return);
    const New& second = std::get<New>(p.main.commands[1].op);
    ASSERT_EQ(second.args.size(), 2u);
    EXPECT_EQ(second.args[0].kind, Argument::Kind::Allocation);
    EXPECT_EQ(second.args[1].kind, Argument::Kind::Literal);
}

TEST(HeapModel, FieldsOfIncludesSuperclassFirst) {
    Program p = parse_program(fig_program());
    EXPECT_EQ(fields_of(p.classes, "BinaryTree$Node"), (std::vector<std::string>{"left", "right", "value"}));
    Program q = parse_program(std::string(kClasses) + "x = new N(null, null, 1);");
    EXPECT_EQ(fields_of(q.classes, "M"), (std::vector<std::string>{"f", "g", "v", "tag"}));
}

TEST(HeapModel, MkFieldsBuildsRootEdgeAndProperties) {
    Program p = parse_program(fig_program());
    PropertyGraph g;
    NodeId node = g.add_node("BinaryTree$Node", {{"value", std::int64_t{5}}});
    NodeId tree = g.add_node("BinaryTree");
    std::vector<ResolvedArg> args{node, PropertyValue{std::int64_t{2}}};
    FieldInit init = mk_fields(g, tree, "BinaryTree", args, p.classes);
    ASSERT_EQ(init.edges.size(), 1u);
    EXPECT_EQ(init.edges[0], (RelSpec{"root", tree, node}));
    EXPECT_EQ(init.properties, (Properties{{"size", std::int64_t{2}}}));
}

TEST(HeapModel, MkFieldsNullArgumentsProduceNoEdge) {
    Program p = parse_program(fig_program());
    PropertyGraph g;
    NodeId leaf = g.add_node("BinaryTree$Node");
    NodeId fresh = g.add_node("BinaryTree$Node");
    std::vector<ResolvedArg> args{leaf, std::monostate{}, PropertyValue{std::int64_t{5}}};
    FieldInit init = mk_fields(g, fresh, "BinaryTree$Node", args, p.classes);
    ASSERT_EQ(init.edges.size(), 1u);
    EXPECT_EQ(init.edges[0].label, "left");
}

TEST(HeapModel, RunToPointYieldsSmallTree) {
    PropertyGraph g = run_to_point(fig_program());
    EXPECT_EQ(g.node_count(), 7u);
    EXPECT_EQ(g.relationship_count(), 7u);
    EXPECT_TRUE(structurally_equal(g, t::small_tree_fixture().graph));
}

TEST(HeapModel, EmptyProgramIsEmptyGraph) {
    PropertyGraph g = run_to_point("");
    EXPECT_EQ(g.node_count(), 0u);
}

TEST(HeapModel, SyntaxErrorNamesPosition) {
    try {
        run_to_point("class A {\n  A f;\n  A(A f) { super(); this.f = f; }\n}\nx = new A(;\n");
        FAIL() << "expected a syntax error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
        EXPECT_NE(std::string(e.what()).find("5:"), std::string::npos) << e.what();
    }
}

TEST(HeapModel, SemanticErrors) {
    std::string cls = kClasses;
    EXPECT_OGO_ERROR(run_to_point(cls + "x = new Q(null);"), ErrorCode::UnknownType);
    EXPECT_OGO_ERROR(run_to_point(cls + "x = new N(null, 1);"), ErrorCode::ArityMismatch);
    EXPECT_OGO_ERROR(run_to_point(cls + "x = new N(y, null, 1);"), ErrorCode::UnboundVariable);
    EXPECT_OGO_ERROR(run_to_point(cls + "x = new N(null, null, 1); x.nope(x);"), ErrorCode::NoSuchMethod);
    EXPECT_OGO_ERROR(run_to_point("class A { B f; A(B f) { super(); this.f = f; } }"), ErrorCode::UnknownType);
}

TEST(HeapModel, FieldAssignRebindsOnlyThatEdge) {
    std::string program = fig_program();
    // Continue past POINT: b.root = l.
    auto pos = program.find("/* POINT */");
    program.insert(pos, "b.root = l;\n");
    PropertyGraph g = run_to_point(program);

    auto expected = t::small_tree_fixture();
    auto& eg = expected.graph;
    for (RelId r : eg.relationship_ids())
        if (eg.relationship(r).label == "root") eg.remove_relationship(r);
    eg.add_relationship("root", expected.tree, expected.leaf);
    EXPECT_TRUE(structurally_equal(g, eg));
}

TEST(HeapModel, MethodInvocationRunsBodyWithThis) {
    PropertyGraph g = run_to_point(std::string(kClasses) +
                                   "x = new N(null, null, 1); y = new M(null, x, 2, \"t\"); y.link(x);");
    // y.f now points at x.
    auto yb = lookup_binding(g, "y");
    auto xb = lookup_binding(g, "x");
    ASSERT_TRUE(yb && xb);
    std::vector<std::string> f{"f"};
    auto out = g.neighbors(*yb, Direction::Out, f);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].other, *xb);
    EXPECT_EQ(g.node(*yb).label, "M");
    EXPECT_EQ(std::get<std::string>(g.node(*yb).properties.at("tag")), "t");
}

TEST(HeapModel, MbodyFindsInheritedMethod) {
    Program p = parse_program(std::string(kClasses));
    MethodBody m = mbody(p.classes, "link", "M");
    EXPECT_EQ(m.declaring_class, "N");
    ASSERT_EQ(m.params.size(), 1u);
    EXPECT_OGO_ERROR(mbody(p.classes, "missing", "M"), ErrorCode::NoSuchMethod);
}

TEST(HeapModel, SubstituteRenamesEverywhere) {
    Program p = parse_program(std::string(kClasses) + "x = new N(null, null, 1); x.f = x; return x;");
    Expr renamed = substitute(p.main, {{"x", "z"}});
    EXPECT_EQ(std::get<New>(renamed.commands[0].op).target, "z");
    EXPECT_EQ(std::get<FieldAssign>(renamed.commands[1].op).source, "z");
    EXPECT_EQ(renamed.result, std::optional<std::string>("z"));
}

TEST(HeapModel, PointStopsEvaluation) {
    PropertyGraph g = run_to_point(std::string(kClasses) + "x = new N(null, null, 1); /* POINT */ y = new N(x, x, 2);");
    EXPECT_FALSE(lookup_binding(g, "y").has_value());
    EXPECT_TRUE(lookup_binding(g, "x").has_value());
}

TEST(HeapModel, RandomFieldAssignmentsMatchSymbolicModel) {
    t::Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        auto s = t::random_assign_scenario(rng, 1 + static_cast<int>(rng() % 5), static_cast<int>(rng() % 8));
        PropertyGraph g = run_to_point(s.program);
        EXPECT_TRUE(structurally_equal(g, t::assign_model_graph(s))) << s.program;
    }
}
