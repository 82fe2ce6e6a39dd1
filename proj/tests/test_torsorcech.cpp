#include <catch2/catch_amalgamated.hpp>

#include "fockgerbe/cech.hpp"
#include "fockgerbe/suites.hpp"
#include "fockgerbe/torsor.hpp"

using namespace fockgerbe;

TEST_CASE("U1 data discipline") {
    CHECK_THROWS(U1Fn::constant(cdouble(2.0, 0.0)));
    Eigen::VectorXcd v(4);
    v << cdouble(1, 0), cdouble(0, 1), cdouble(-1, 0), cdouble(0, -1);
    const U1Fn f = U1Fn::circle(v);
    CHECK((f * f.inverse()).is_one(1e-14));
    CHECK_THROWS_AS(f.restricted_to(GridDesc::circle(8)), GridMismatchError);
    const U1Fn c = U1Fn::constant(cdouble(0, 1));
    CHECK(c.restricted_to(GridDesc::circle(4)).samples.size() == 4);
}

TEST_CASE("cochain alternation and nerve discipline") {
    const CoverPtr cover = suites::triple_cover(0);
    CechCochain c(cover, 1);
    Rng rng(5);
    c.set({2, 3}, suites::random_u1(rng, GridDesc::constant()));
    CHECK(c.value({3, 2}).dist(c.value({2, 3}).inverse()) < 1e-14);
    CHECK(c.value({2, 2}).is_one());
    CHECK_THROWS_AS(c.set({2, 3, 4}, U1Fn::one()), Error);

    IndexedCover badnerve;
    badnerve.indices = {0, 1};
    badnerve.nerve[{0, 1}] = GridDesc::constant(); // singleton faces missing
    CHECK_THROWS_AS(badnerve.validate(), NerveIncompleteError);
}

TEST_CASE("serialization round trips") {
    Rng rng(6);
    const CoverPtr cover = suites::triple_cover(8);
    CechCochain c(cover, 1);
    for (const Tuple& t : cover->tuples_of_size(2))
        c.set(t, suites::random_u1(rng, cover->grid(t)));
    const nlohmann::json j = cochain_to_json(c);
    const CechCochain back = cochain_from_json(j);
    CHECK(back.degree == 1);
    CHECK(back.dist(c) < 1e-14);
    // schema fields exist as documented
    CHECK(j.contains("cover"));
    CHECK(j.contains("degree"));
    CHECK(j.at("entries").at(0).contains("tuple"));
    CHECK(j.at("entries").at(0).contains("kind"));
    CHECK(j.at("entries").at(0).contains("data"));
}

TEST_CASE("dd cocycle with a twisted multiplication") {
    // multiplication twisted by the coboundary of a fixed 1-cochain stays
    // associative, and the output cocycle shifts by exactly that coboundary
    Rng rng(7);
    const CoverPtr cover = suites::triple_cover(8);
    std::map<std::pair<int, int>, U1Fn> tw;
    SectionFamily sections;
    for (int i : cover->indices)
        for (int j : cover->indices)
            if (i < j) {
                tw[{i, j}] = suites::random_u1(rng, GridDesc::circle(8));
                sections.set(i, j, suites::random_u1(rng, GridDesc::circle(8)));
            }
    auto twisted = [&](int i, int j, int k, const U1Fn& a, const U1Fn& b) {
        const U1Fn wij = tw.at({std::min(i, j), std::max(i, j)});
        const U1Fn wjk = tw.at({std::min(j, k), std::max(j, k)});
        const U1Fn wik = tw.at({std::min(i, k), std::max(i, k)});
        return a * b * wij * wjk * wik.inverse();
    };
    const CechCochain g = dd_cocycle(cover, sections, twisted);
    CHECK(cocycle_defect(g) < 1e-12);
    // the sections contribute their own coboundary on top of the twist
    const U1Fn expected = sections.get(2, 3) * sections.get(3, 4) *
                          sections.get(2, 4).inverse() * tw.at({2, 3}) * tw.at({3, 4}) *
                          tw.at({2, 4}).inverse();
    CHECK(g.value({2, 3, 4}).dist(expected) < 1e-12);
}

TEST_CASE("suspension rejects non-cocycles") {
    auto base = std::make_shared<IndexedCover>();
    base->indices = {2, 3, 4};
    const GridDesc g = GridDesc::constant();
    for (int i : base->indices) base->nerve[{i}] = g;
    base->nerve[{2, 3}] = g;
    base->nerve[{2, 4}] = g;
    base->nerve[{3, 4}] = g;
    base->nerve[{2, 3, 4}] = g; // triple overlap makes the cocycle condition bite
    base->validate();
    const SuspensionCover sc = build_suspension_cover(*base);
    Rng rng(8);
    CechCochain h(sc.base_restriction, 1);
    h.set({2, 3}, suites::random_u1(rng, g));
    h.set({2, 4}, suites::random_u1(rng, g));
    h.set({3, 4}, suites::random_u1(rng, g));
    // generic pair data on a cover with a triple is not a cocycle
    CHECK_THROWS_AS(suspension_forward(h, sc), SupportShapeError);

    // a coboundary is one, and the chase round-trips it
    CechCochain zero(sc.base_restriction, 0);
    for (int i : base->indices) zero.set({i}, suites::random_u1(rng, g));
    const CechCochain hb = cech_coboundary(zero);
    const CechCochain gsig = suspension_forward(hb, sc);
    CHECK(suspension_partial_inverse(gsig, sc).dist(hb) < 1e-13);
}

TEST_CASE("base cover indices must avoid the cap labels") {
    IndexedCover base;
    base.indices = {1, 2};
    base.nerve[{1}] = GridDesc::constant();
    base.nerve[{2}] = GridDesc::constant();
    CHECK_THROWS(build_suspension_cover(base));
}

TEST_CASE("randomized torsor and cech suites") {
    const auto tres = suites::suite_torsor(909);
    for (const auto& f : tres.failures) UNSCOPED_INFO(f);
    CHECK(tres.failures.empty());
    const auto cres = suites::suite_cech(909);
    for (const auto& f : cres.failures) UNSCOPED_INFO(f);
    CHECK(cres.failures.empty());
}
