#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "mip/rng.hpp"

using namespace mip;

TEST_CASE("same seed gives identical sequences") {
    RngStream a = RngStream::root(42);
    RngStream b = RngStream::root(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("child streams are independent of parent consumption") {
    RngStream a = RngStream::root(42);
    RngStream c1 = a.child(7);
    a.next_u64();
    a.next_u64();
    RngStream c2 = a.child(7);
    for (int i = 0; i < 20; ++i) CHECK(c1.next_u64() == c2.next_u64());
}

TEST_CASE("uniform stays in [0,1) and has a sane mean") {
    RngStream s = RngStream::root(1);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        double u = s.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / 100000.0 - 0.5) < 0.01);
}

TEST_CASE("uniform_int covers the range") {
    RngStream s = RngStream::root(2);
    std::set<uint64_t> seen;
    for (int i = 0; i < 1000; ++i) seen.insert(s.uniform_int(7));
    CHECK(seen.size() == 7);
    CHECK(*seen.rbegin() == 6);
    CHECK_THROWS(s.uniform_int(0));
}

TEST_CASE("poisson and exponential means") {
    RngStream s = RngStream::root(3);
    double psum = 0.0, esum = 0.0;
    int n = 50000;
    for (int i = 0; i < n; ++i) {
        psum += s.poisson(4.5);
        esum += s.exponential(2.0);
    }
    CHECK(std::abs(psum / n - 4.5) < 0.05);
    CHECK(std::abs(esum / n - 2.0) < 0.05);
}

TEST_CASE("geometric failure counts match the capped distribution") {
    RngStream s = RngStream::root(4);
    int n = 200000;
    double sum = 0.0;
    int over_cap = 0;
    for (int i = 0; i < n; ++i) {
        int k = s.geometric_failures(0.3, 3);
        if (k > 3) ++over_cap;
        sum += k;
    }
    CHECK(over_cap == 0);
    // E[k] = p + p^2 + p^3 for cap 3
    CHECK(std::abs(sum / n - (0.3 + 0.09 + 0.027)) < 0.01);
}

TEST_CASE("normal moments") {
    RngStream s = RngStream::root(5);
    int n = 100000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        double v = s.normal(1.0, 2.0);
        sum += v;
        sq += v * v;
    }
    double mean = sum / n;
    double var = sq / n - mean * mean;
    CHECK(std::abs(mean - 1.0) < 0.03);
    CHECK(std::abs(var - 4.0) < 0.1);
}

TEST_CASE("categorical respects the weights") {
    RngStream s = RngStream::root(6);
    double probs[3] = {0.7, 0.2, 0.1};
    int counts[3] = {0, 0, 0};
    int n = 100000;
    for (int i = 0; i < n; ++i) counts[s.categorical(probs)] += 1;
    CHECK(std::abs(counts[0] / double(n) - 0.7) < 0.01);
    CHECK(std::abs(counts[1] / double(n) - 0.2) < 0.01);
    CHECK(std::abs(counts[2] / double(n) - 0.1) < 0.01);
}
