// Runs every acceptance criterion and prints one line per criterion.
#include "radsol/acceptance.hpp"

#include <cstdio>

int main() {
    using namespace radsol::acceptance;
    const auto results = run(Settings{});
    bool ok = true;
    for (const auto& r : results) {
        std::printf("%s\n", summary_line(r).c_str());
        for (const auto& c : r.checks)
            if (!c.pass)
                std::printf("       failed: %s [%s] %.6g %s %.6g\n", c.name.c_str(), c.anchor.c_str(), c.value,
                            c.relation.c_str(), c.limit);
        ok = ok && r.pass();
    }
    std::printf("%s\n", ok ? "all acceptance criteria passed" : "acceptance FAILED");
    return ok ? 0 : 1;
}
