#include <catch2/catch_amalgamated.hpp>

#include "rlcore/dataset.hpp"
#include "rlcore/rng.hpp"
#include "rlcore/space.hpp"

using namespace rlcore;

TEST_CASE("discrete space membership") {
    const Space s = Space::discrete(4);
    REQUIRE(s.is_discrete());
    REQUIRE(s.size() == 4);
    REQUIRE(s.contains(State::index(0)));
    REQUIRE(s.contains(State::index(3)));
    REQUIRE_FALSE(s.contains(State::index(4)));
    REQUIRE_FALSE(s.contains(State::vector(Vec::Zero(1))));
    REQUIRE_THROWS_AS(Space::discrete(0), DomainError);
}

TEST_CASE("box space membership and bounds") {
    Vec lo(2), hi(2);
    lo << -1.0, 0.0;
    hi << 1.0, 2.0;
    const Space s = Space::box(lo, hi);
    REQUIRE_FALSE(s.is_discrete());
    REQUIRE(s.dim() == 2);
    Vec x(2);
    x << 0.5, 1.0;
    REQUIRE(s.contains(State::vector(x)));
    x << 1.5, 1.0;
    REQUIRE_FALSE(s.contains(State::vector(x)));
    REQUIRE_FALSE(s.contains(State::index(0)));

    Vec bad_hi(2);
    bad_hi << -2.0, 2.0;
    REQUIRE_THROWS_AS(Space::box(lo, bad_hi), DomainError);
    REQUIRE_THROWS_AS(Space::box(lo, Vec::Zero(3)), DomainError);
}

TEST_CASE("mdp info invariants") {
    REQUIRE_THROWS_AS(MdpInfo(Space::discrete(2), Space::discrete(2), 0.0, 10), DomainError);
    REQUIRE_THROWS_AS(MdpInfo(Space::discrete(2), Space::discrete(2), 1.1, 10), DomainError);
    REQUIRE_THROWS_AS(MdpInfo(Space::discrete(2), Space::discrete(2), 0.9, 0), DomainError);
    const MdpInfo ok(Space::discrete(2), Space::discrete(3), 1.0, 1);
    REQUIRE(ok.n_actions() == 3);
}

namespace {

Transition make_t(double r, bool absorbing, bool last) {
    Transition t;
    t.state = State::index(0);
    t.action = State::index(0);
    t.reward = r;
    t.next_state = State::index(0);
    t.absorbing = absorbing;
    t.last = last;
    return t;
}

} // namespace

TEST_CASE("compute_J per episode") {
    Dataset d;
    d.push_back(make_t(1.0, false, false));
    d.push_back(make_t(1.0, false, false));
    d.push_back(make_t(1.0, false, true));
    d.push_back(make_t(2.0, true, true));

    SECTION("geometric sum") {
        const auto j = d.compute_J(0.5);
        REQUIRE(j.size() == 2);
        REQUIRE(j[0] == Catch::Approx(1.75));
        REQUIRE(j[1] == Catch::Approx(2.0));
    }
    SECTION("gamma = 1 is the plain sum") {
        const auto j = d.compute_J(1.0);
        REQUIRE(j[0] == Catch::Approx(3.0));
    }
    SECTION("single-transition episode returns its reward for any gamma") {
        const auto j = d.compute_J(0.123);
        REQUIRE(j[1] == Catch::Approx(2.0));
    }
    SECTION("empty dataset gives an empty vector") {
        REQUIRE(Dataset{}.compute_J(0.9).empty());
    }
}

TEST_CASE("dataset invariants catch malformed sequences") {
    const MdpInfo info(Space::discrete(2), Space::discrete(2), 0.9, 2);
    Dataset ok;
    ok.push_back(make_t(0.0, false, false));
    ok.push_back(make_t(0.0, false, true));
    REQUIRE_NOTHROW(ok.check_invariants(info));

    Dataset absorbing_not_last;
    absorbing_not_last.push_back(make_t(0.0, true, false));
    REQUIRE_THROWS_AS(absorbing_not_last.check_invariants(info), StateError);

    Dataset too_long;
    too_long.push_back(make_t(0.0, false, false));
    too_long.push_back(make_t(0.0, false, false));
    too_long.push_back(make_t(0.0, false, true));
    REQUIRE_THROWS_AS(too_long.check_invariants(info), StateError);
}

TEST_CASE("episode splitting excludes the trailing incomplete episode on request") {
    Dataset d;
    d.push_back(make_t(0.0, false, true));
    d.push_back(make_t(0.0, false, false));
    REQUIRE(d.episode_ranges().size() == 2);
    REQUIRE(d.episode_ranges(true).size() == 1);
    REQUIRE(d.n_episodes() == 1);
}

TEST_CASE("seed splitting separates component streams") {
    const auto a = split_seed(42, "env");
    const auto b = split_seed(42, "policy");
    const auto c = split_seed(43, "env");
    REQUIRE(a != b);
    REQUIRE(a != c);
    REQUIRE(a == split_seed(42, "env"));
}

TEST_CASE("rng transforms are deterministic and in range") {
    Rng r1(123), r2(123);
    for (int i = 0; i < 1000; ++i) {
        const double u = r1.uniform();
        REQUIRE(u == r2.uniform());
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
    Rng r3(5);
    for (int i = 0; i < 1000; ++i) {
        const auto v = r3.uniform_int(7);
        REQUIRE(v >= 0);
        REQUIRE(v < 7);
    }
}
