#include <doctest.h>

#include <cstdio>

#include "gputrace/hostlist.hpp"
#include "gputrace/rng.hpp"
#include "hostlist_corpus.hpp"

using namespace gputrace;

TEST_CASE("corpus pairs expand exactly") {
    for (const auto& c : corpus::cases()) {
        CAPTURE(c.expr);
        CHECK(expand_hostlist(c.expr) == c.expanded);
    }
}

TEST_CASE("malformed expressions are rejected") {
    for (const auto& expr : corpus::malformed()) {
        CAPTURE(expr);
        CHECK_THROWS_AS(expand_hostlist(expr), HostlistError);
    }
}

TEST_CASE("compress is left inverse of expand on generated ranges") {
    SplitMix64 rng(42);
    for (int iter = 0; iter < 500; ++iter) {
        std::vector<std::string> nodes;
        const int segments = static_cast<int>(rng.next_int(1, 3));
        long long base = 0;
        for (int s = 0; s < segments; ++s) {
            const int width = static_cast<int>(rng.next_int(1, 6));
            base += rng.next_int(1, 50);
            const long long count = rng.next_int(1, 20);
            for (long long v = base; v < base + count; ++v) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "nid%0*lld", width, v);
                // Wider numbers than the pad width change the rendered width;
                // keep values inside it so padding is well defined.
                if (std::string(buf).size() != static_cast<std::size_t>(width) + 3) break;
                nodes.push_back(buf);
            }
            base += count + 1;
        }
        if (nodes.empty()) continue;
        CAPTURE(compress_hostlist(nodes));
        CHECK(expand_hostlist(compress_hostlist(nodes)) == nodes);
    }
}

TEST_CASE("expansion is duplicate free and order preserving") {
    auto nodes = expand_hostlist("b[2-3],a,b2,a");
    CHECK(nodes == std::vector<std::string>{"b2", "b3", "a"});
}
